#include "bdprof/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bdprof/common.hpp"
#include "bdprof/edt.hpp"
#include "bdprof/splines.hpp"

namespace bdp {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<Point> clean_polygon(const std::vector<Point>& in) {
    std::vector<Point> out;
    for (const auto& p : in) {
        if (!out.empty() && std::hypot(p.x - out.back().x, p.y - out.back().y) < 1e-12) continue;
        out.push_back(p);
    }
    if (out.size() >= 2 && std::hypot(out.front().x - out.back().x, out.front().y - out.back().y) < 1e-12)
        out.pop_back();
    return out;
}

double orient(const Point& a, const Point& b, const Point& c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

bool on_segment(const Point& a, const Point& b, const Point& p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

bool segments_intersect(const Point& a, const Point& b, const Point& c, const Point& d) {
    double o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
    if (((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0)
        return true;
    if (o1 == 0 && on_segment(a, b, c)) return true;
    if (o2 == 0 && on_segment(a, b, d)) return true;
    if (o3 == 0 && on_segment(c, d, a)) return true;
    if (o4 == 0 && on_segment(c, d, b)) return true;
    return false;
}

bool polygon_self_intersects(const std::vector<Point>& p) {
    const size_t n = p.size();
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            // skip segments sharing a vertex (adjacent, including the wrap pair)
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            if (segments_intersect(p[i], p[(i + 1) % n], p[j], p[(j + 1) % n])) return true;
        }
    }
    return false;
}

double signed_area(const std::vector<Point>& p) {
    double s = 0.0;
    const size_t n = p.size();
    for (size_t i = 0; i < n; ++i) {
        const auto& a = p[i];
        const auto& b = p[(i + 1) % n];
        s += a.x * b.y - b.x * a.y;
    }
    return 0.5 * s;
}

// Monotone-decreasing equivalent degrees of freedom, shared by both
// coordinates (the trace depends only on the knots).  Bisection on log10.
double lambda_for_edf(const PeriodicSmoothingSpline& probe, double target, double lo_log, double hi_log) {
    double lo = lo_log, hi = hi_log;
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        if (probe.trace_hat(std::pow(10.0, mid)) > target)
            lo = mid;
        else
            hi = mid;
    }
    return std::pow(10.0, 0.5 * (lo + hi));
}

}  // namespace

double polygon_area(const std::vector<Point>& points) { return std::fabs(signed_area(points)); }

BoundaryCurve smooth_boundary(const std::vector<Point>& vertices, const SmoothOptions& options) {
    std::vector<Point> poly = clean_polygon(vertices);
    if (poly.size() < 3) throw DataError("boundary polygon needs at least 3 distinct vertices");
    if (polygon_self_intersects(poly)) throw DataError("boundary polygon is self-intersecting");
    if (polygon_area(poly) <= 1e-9) throw DataError("boundary polygon has zero enclosed area");
    if (options.samples < 8) throw ConfigError("boundary resampling needs at least 8 samples");
    if (options.penalty && !(*options.penalty >= 0)) throw ConfigError("boundary penalty must be >= 0");

    const size_t n = poly.size();
    std::vector<double> t(n, 0.0), xs(n), ys(n);
    double length = 0.0;
    for (size_t i = 0; i < n; ++i) {
        xs[i] = poly[i].x;
        ys[i] = poly[i].y;
        if (i > 0) {
            length += std::hypot(poly[i].x - poly[i - 1].x, poly[i].y - poly[i - 1].y);
            t[i] = length;
        }
    }
    length += std::hypot(poly[0].x - poly[n - 1].x, poly[0].y - poly[n - 1].y);
    for (auto& v : t) v *= kTwoPi / length;

    PeriodicSmoothingSpline sx(t, xs, kTwoPi);
    PeriodicSmoothingSpline sy(t, ys, kTwoPi);

    double lambda;
    if (options.penalty) {
        lambda = *options.penalty;
    } else {
        // Constrained GCV: minimize GCV_x + GCV_y over penalties whose edf does
        // not exceed 0.75 n.
        const double cap = 0.75 * static_cast<double>(n);
        double lam_cap = lambda_for_edf(sx, cap, -14.0, 14.0);
        double lam_hi = lambda_for_edf(sx, std::min(cap, 1.2), -14.0, 14.0);
        auto gcv_sum = [&](double log_lam) {
            double lam = std::pow(10.0, log_lam);
            double tr = sx.trace_hat(lam);
            double denom = static_cast<double>(n) - tr;
            if (denom <= 0) return std::numeric_limits<double>::infinity();
            sx.fit(lam);
            sy.fit(lam);
            return static_cast<double>(n) * (sx.rss() + sy.rss()) / (denom * denom);
        };
        const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
        double a = std::log10(lam_cap), b = std::log10(lam_hi);
        if (a > b) std::swap(a, b);
        double c = b - gr * (b - a), d = a + gr * (b - a);
        double fc = gcv_sum(c), fd = gcv_sum(d);
        for (int it = 0; it < 60 && b - a > 1e-3; ++it) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - gr * (b - a);
                fc = gcv_sum(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + gr * (b - a);
                fd = gcv_sum(d);
            }
        }
        lambda = std::pow(10.0, fc < fd ? c : d);
    }

    sx.fit(lambda);
    sy.fit(lambda);

    BoundaryCurve out;
    out.vertices = std::move(poly);
    out.smoothing_penalty = lambda;
    out.smoothed.resize(options.samples);
    for (int j = 0; j < options.samples; ++j) {
        double s = kTwoPi * j / options.samples;
        out.smoothed[j] = {sx(s), sy(s)};
    }
    if (polygon_area(out.smoothed) <= 0.0) throw NumericError("smoothed boundary collapsed to zero area");
    return out;
}

Mask rasterize_polygon(const std::vector<Point>& points, int width, int height) {
    Mask mask(width, height, 0);
    const size_t n = points.size();
    std::vector<double> crossings;
    for (int y = 0; y < height; ++y) {
        crossings.clear();
        const double fy = static_cast<double>(y);
        for (size_t i = 0; i < n; ++i) {
            const Point& a = points[i];
            const Point& b = points[(i + 1) % n];
            // half-open in y so shared vertices are counted once
            if ((a.y <= fy && fy < b.y) || (b.y <= fy && fy < a.y)) {
                crossings.push_back(a.x + (fy - a.y) * (b.x - a.x) / (b.y - a.y));
            }
        }
        std::sort(crossings.begin(), crossings.end());
        for (size_t k = 0; k + 1 < crossings.size(); k += 2) {
            int x0 = static_cast<int>(std::ceil(crossings[k]));
            int x1 = static_cast<int>(std::ceil(crossings[k + 1]));  // exclusive
            x0 = std::max(x0, 0);
            x1 = std::min(x1, width);
            for (int x = x0; x < x1; ++x) mask.at(x, y) = 1;
        }
    }
    return mask;
}

BDMap build_bd_map(const std::vector<BoundaryCurve>& nuclei, int width, int height) {
    if (nuclei.empty()) throw DataError("bd map needs at least one nucleus");
    BDMap map;
    map.bd = Raster<double>(width, height, std::numeric_limits<double>::infinity());
    map.orbit = Raster<int32_t>(width, height, -1);
    map.d_max.resize(nuclei.size(), 0.0);

    Mask claimed(width, height, 0);
    for (size_t k = 0; k < nuclei.size(); ++k) {
        Mask interior = rasterize_polygon(nuclei[k].smoothed, width, height);
        int64_t count = 0;
        for (size_t i = 0; i < interior.data.size(); ++i) {
            if (!interior.data[i]) continue;
            ++count;
            if (claimed.data[i]) throw DataError("nucleus interiors overlap at index " + std::to_string(k));
            claimed.data[i] = 1;
        }
        if (count == 0) throw DataError("nucleus " + std::to_string(k) + " rasterizes to an empty interior");

        Raster<int64_t> sq_in = squared_edt(interior);
        int64_t max_sq = 0;
        for (auto v : sq_in.data) max_sq = std::max(max_sq, v);
        const double d_m = std::sqrt(static_cast<double>(max_sq));
        map.d_max[k] = d_m;

        Mask exterior(width, height, 0);
        for (size_t i = 0; i < interior.data.size(); ++i) exterior.data[i] = interior.data[i] ? 0 : 1;
        Raster<int64_t> sq_out = squared_edt(exterior);

        for (size_t i = 0; i < interior.data.size(); ++i) {
            double bd_k = interior.data[i]
                              ? 1.0 - std::sqrt(static_cast<double>(sq_in.data[i])) / d_m
                              : 1.0 + std::sqrt(static_cast<double>(sq_out.data[i])) / d_m;
            // strict less keeps the lowest nucleus index on exact ties
            if (bd_k < map.bd.data[i]) {
                map.bd.data[i] = bd_k;
                map.orbit.data[i] = static_cast<int32_t>(k);
            }
        }
    }
    return map;
}

std::vector<int> exclude_border_nuclei(const std::vector<BoundaryCurve>& nuclei, int width, int height,
                                       double margin) {
    std::vector<int> kept;
    for (size_t k = 0; k < nuclei.size(); ++k) {
        bool ok = true;
        for (const auto& p : nuclei[k].smoothed) {
            if (p.x < margin || p.x > width - 1 - margin || p.y < margin || p.y > height - 1 - margin) {
                ok = false;
                break;
            }
        }
        if (ok) kept.push_back(static_cast<int>(k));
    }
    return kept;
}

double sample_bilinear(const Raster<double>& raster, double x, double y) {
    x = std::clamp(x, 0.0, static_cast<double>(raster.width - 1));
    y = std::clamp(y, 0.0, static_cast<double>(raster.height - 1));
    int x0 = std::min(static_cast<int>(x), raster.width - 2 >= 0 ? raster.width - 2 : 0);
    int y0 = std::min(static_cast<int>(y), raster.height - 2 >= 0 ? raster.height - 2 : 0);
    if (raster.width == 1) x0 = 0;
    if (raster.height == 1) y0 = 0;
    int x1 = std::min(x0 + 1, raster.width - 1);
    int y1 = std::min(y0 + 1, raster.height - 1);
    double fx = x - x0, fy = y - y0;
    double v00 = raster.at(x0, y0), v10 = raster.at(x1, y0);
    double v01 = raster.at(x0, y1), v11 = raster.at(x1, y1);
    return v00 * (1 - fx) * (1 - fy) + v10 * fx * (1 - fy) + v01 * (1 - fx) * fy + v11 * fx * fy;
}

}  // namespace bdp
