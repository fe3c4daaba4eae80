#include "bdprof/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "bdprof/rng.hpp"

namespace bdp {
namespace {

constexpr int kScanPoints = 256;   // quarter-outline bracketing resolution
constexpr double kPi = 3.14159265358979323846;

double golden_min(double lo, double hi, const auto& f) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 90 && b - a > 1e-13; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

void validate(const SynthSpec& spec) {
    if (spec.width < 16 || spec.height < 16) throw ConfigError("image must be at least 16x16");
    if (spec.nuclei.empty()) throw ConfigError("at least one nucleus is required");
    if (spec.channels.empty()) throw ConfigError("at least one channel template is required");
    if (spec.noise_sigma < 0.0) throw ConfigError("noise_sigma must be >= 0");
    if (spec.boundary_jitter < 0.0) throw ConfigError("boundary_jitter must be >= 0");
    if (spec.boundary_vertices < 8) throw ConfigError("need at least 8 boundary vertices");
    for (const auto& [role, tmpl] : spec.channels) {
        if (tmpl.kind == TemplateKind::boundary_peak && tmpl.width <= 0.0)
            throw ConfigError("boundary_peak template needs width > 0 for channel " + role);
    }
    const double margin = spec.boundary_jitter + 3.0;
    for (const auto& e : spec.nuclei) {
        if (!(e.a >= e.b && e.b > 0.0))
            throw ConfigError("ellipse axes must satisfy a >= b > 0");
        const double reach = e.a + margin;
        if (e.cx - reach < 0.0 || e.cx + reach > spec.width - 1.0 || e.cy - reach < 0.0 ||
            e.cy + reach > spec.height - 1.0)
            throw ConfigError("infeasible ellipse layout: nucleus extends past the image border");
    }
    for (size_t i = 0; i < spec.nuclei.size(); ++i)
        for (size_t j = i + 1; j < spec.nuclei.size(); ++j) {
            const auto& p = spec.nuclei[i];
            const auto& q = spec.nuclei[j];
            const double dist = std::hypot(p.cx - q.cx, p.cy - q.cy);
            if (dist < p.a + q.a + 2.0 * spec.boundary_jitter + 6.0)
                throw ConfigError("infeasible ellipse layout: nuclei overlap or touch");
        }
}

}  // namespace

EllipseDistance::EllipseDistance(const EllipseSpec& e) : spec_(e) {
    ct_ = std::cos(e.theta);
    st_ = std::sin(e.theta);
    scan_.resize(kScanPoints + 1);
    for (int i = 0; i <= kScanPoints; ++i) {
        const double phi = (kPi / 2.0) * i / kScanPoints;
        scan_[i] = {spec_.a * std::cos(phi), spec_.b * std::sin(phi)};
    }
}

bool EllipseDistance::inside(double x, double y) const {
    const double dx = x - spec_.cx, dy = y - spec_.cy;
    const double lx = ct_ * dx + st_ * dy, ly = -st_ * dx + ct_ * dy;
    const double qa = lx / spec_.a, qb = ly / spec_.b;
    return qa * qa + qb * qb <= 1.0;
}

double EllipseDistance::distance(double x, double y) const {
    const double dx = x - spec_.cx, dy = y - spec_.cy;
    // Fold into the first quadrant of the unrotated frame; the outline and the
    // distance are symmetric in both axes.
    const double lx = std::abs(ct_ * dx + st_ * dy);
    const double ly = std::abs(-st_ * dx + ct_ * dy);
    int best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= kScanPoints; ++i) {
        const double ex = scan_[i][0] - lx, ey = scan_[i][1] - ly;
        const double d2 = ex * ex + ey * ey;
        if (d2 < best_d2) {
            best_d2 = d2;
            best = i;
        }
    }
    const double step = (kPi / 2.0) / kScanPoints;
    const double lo = std::max(0.0, (best - 1) * step);
    const double hi = std::min(kPi / 2.0, (best + 1) * step);
    const auto d2_at = [&](double phi) {
        const double ex = spec_.a * std::cos(phi) - lx, ey = spec_.b * std::sin(phi) - ly;
        return ex * ex + ey * ey;
    };
    const double refined = d2_at(golden_min(lo, hi, d2_at));
    return std::sqrt(std::min(best_d2, refined));
}

double bd_true(const std::vector<EllipseSpec>& nuclei, double x, double y) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : nuclei) {
        const EllipseDistance geom(e);
        const double d = geom.distance(x, y);
        const double bd = geom.inside(x, y) ? 1.0 - d / e.b : 1.0 + d / e.b;
        best = std::min(best, bd);
    }
    return best;
}

double ProfileTemplate::eval(double r) const {
    switch (kind) {
        case TemplateKind::constant:
            return level;
        case TemplateKind::step:
            return r <= edge ? level : level_out;
        case TemplateKind::ramp:
            return level + (level_out - level) * (std::min(r, 2.0) / 2.0);
        case TemplateKind::boundary_peak: {
            const double z = (r - edge) / width;
            return level_out + (level - level_out) * std::exp(-0.5 * z * z);
        }
    }
    return level;
}

SynthResult generate(const SynthSpec& spec) {
    validate(spec);
    SynthResult out;

    // Boundaries: equally spaced parameter values on the exact outline, and a
    // radially displaced copy (one uniform draw per vertex, nucleus-keyed
    // stream so layouts are stable under unrelated spec edits).
    for (size_t k = 0; k < spec.nuclei.size(); ++k) {
        const auto& e = spec.nuclei[k];
        const double ct = std::cos(e.theta), st = std::sin(e.theta);
        std::vector<Point> truth(spec.boundary_vertices), jittered(spec.boundary_vertices);
        auto rng = make_rng(spec.seed, 2000 + static_cast<uint64_t>(k));
        std::uniform_real_distribution<double> jitter(-spec.boundary_jitter, spec.boundary_jitter);
        for (int j = 0; j < spec.boundary_vertices; ++j) {
            const double t = 2.0 * kPi * j / spec.boundary_vertices;
            const double ux = e.a * std::cos(t), uy = e.b * std::sin(t);
            const Point v{e.cx + ct * ux - st * uy, e.cy + st * ux + ct * uy};
            truth[j] = v;
            const double rho = std::hypot(v.x - e.cx, v.y - e.cy);
            const double eps = spec.boundary_jitter > 0.0 ? jitter(rng) : 0.0;
            const double f = (rho + eps) / rho;
            jittered[j] = {e.cx + (v.x - e.cx) * f, e.cy + (v.y - e.cy) * f};
        }
        out.true_boundaries.push_back(std::move(truth));
        out.jittered_boundaries.push_back(std::move(jittered));
    }

    // Scaled boundary distance of every pixel, shared across channels.
    std::vector<EllipseDistance> geoms;
    geoms.reserve(spec.nuclei.size());
    for (const auto& e : spec.nuclei) geoms.emplace_back(e);
    Raster<double> bd(spec.width, spec.height, 0.0);
    for (int y = 0; y < spec.height; ++y)
        for (int x = 0; x < spec.width; ++x) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& g : geoms) {
                const double d = g.distance(x, y);
                const double v =
                    g.inside(x, y) ? 1.0 - d / g.spec().b : 1.0 + d / g.spec().b;
                best = std::min(best, v);
            }
            bd.at(x, y) = best;
        }

    out.image.width = spec.width;
    out.image.height = spec.height;
    out.image.pixel_size_um = 1.0;
    out.image.bit_depth = 8;

    int plane_index = 0;
    for (const auto& [role, tmpl] : spec.channels) {
        Raster<double> plane(spec.width, spec.height, 0.0);
        auto rng = make_rng(spec.seed, 1000 + static_cast<uint64_t>(plane_index));
        std::normal_distribution<double> noise(0.0, spec.noise_sigma);
        const auto& c = spec.illumination;
        for (int y = 0; y < spec.height; ++y) {
            const double v = static_cast<double>(y) / (spec.height - 1);
            for (int x = 0; x < spec.width; ++x) {
                const double u = static_cast<double>(x) / (spec.width - 1);
                const double illum =
                    c[0] + c[1] * u + c[2] * v + c[3] * u * u + c[4] * u * v + c[5] * v * v;
                double value = illum * tmpl.eval(bd.at(x, y));
                if (spec.noise_sigma > 0.0) value += noise(rng);
                plane.at(x, y) = std::clamp(value, 0.0, 255.0);
            }
        }
        out.image.planes.push_back(std::move(plane));
        out.image.roles[role] = plane_index++;
        auto& truth = out.truth_curves[role];
        for (int i = 0; i < kGridSize; ++i) truth[i] = tmpl.eval(grid_r(i));
    }
    return out;
}

std::vector<Point> star_polygon(double cx, double cy, double r_outer, double r_inner, int points,
                                double rotation) {
    if (points < 3 || r_inner <= 0.0 || r_outer <= r_inner)
        throw ConfigError("star needs >= 3 points and 0 < r_inner < r_outer");
    std::vector<Point> out;
    out.reserve(2 * points);
    for (int j = 0; j < 2 * points; ++j) {
        const double r = j % 2 == 0 ? r_outer : r_inner;
        const double t = rotation + kPi * j / points;
        out.push_back({cx + r * std::cos(t), cy + r * std::sin(t)});
    }
    return out;
}

}  // namespace bdp
