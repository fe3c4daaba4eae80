#include "bdprof/plm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include <boost/math/distributions/students_t.hpp>

#include "bdprof/common.hpp"

namespace bdp {
namespace {

// Prefix sums of the weighted moments needed for a straight-line WLS fit on
// any contiguous run of grid points; sums[i] covers grid indices [0, i).
struct Moments {
    std::array<double, kGridSize + 1> w{}, wr{}, wrr{}, wy{}, wry{}, wyy{};
};

Moments accumulate(const std::array<double, kGridSize>& y, bool weighted) {
    Moments m;
    for (int i = 0; i < kGridSize; ++i) {
        const double r = grid_r(i);
        const double w = weighted ? density_weight(r) : 1.0;
        m.w[i + 1] = m.w[i] + w;
        m.wr[i + 1] = m.wr[i] + w * r;
        m.wrr[i + 1] = m.wrr[i] + w * r * r;
        m.wy[i + 1] = m.wy[i] + w * y[i];
        m.wry[i + 1] = m.wry[i] + w * r * y[i];
        m.wyy[i + 1] = m.wyy[i] + w * y[i] * y[i];
    }
    return m;
}

struct Line {
    double a = 0.0, b = 0.0, sse = 0.0;
};

// WLS line over grid indices [lo, hi).  Needs >= 2 points; the grid abscissae
// are distinct so the normal equations are nonsingular.
Line fit_line(const Moments& m, int lo, int hi) {
    const double sw = m.w[hi] - m.w[lo];
    const double sr = m.wr[hi] - m.wr[lo];
    const double srr = m.wrr[hi] - m.wrr[lo];
    const double sy = m.wy[hi] - m.wy[lo];
    const double sry = m.wry[hi] - m.wry[lo];
    const double syy = m.wyy[hi] - m.wyy[lo];
    Line out;
    out.b = (sw * sry - sr * sy) / (sw * srr - sr * sr);
    out.a = (sy - out.b * sr) / sw;
    // Residual identity for the normal-equation solution; clamp the last-ulp
    // negatives an exact fit can produce.
    out.sse = std::max(0.0, syy - out.a * sy - out.b * sry);
    return out;
}

// Knots live on the analysis grid: kappa = 0.01k.  Returns k or throws.
int knot_index(double kappa, const char* which) {
    const double scaled = kappa * 100.0;
    const int k = static_cast<int>(std::lround(scaled));
    if (std::abs(scaled - k) > 1e-6)
        throw ConfigError(std::string(which) + " must be a multiple of 0.01");
    return k;
}

SegmentFit segments_at(const Moments& m, int k2, int k3) {
    SegmentFit fit;
    const Line first = fit_line(m, 0, k2);
    const Line last = fit_line(m, k3, kGridSize);
    fit.a[0] = first.a;
    fit.b[0] = first.b;
    fit.a[2] = last.a;
    fit.b[2] = last.b;
    // Accumulated in segment order so the value is bit-identical to the
    // search criterion evaluated at the same knots.
    fit.wsse = first.sse;
    if (k2 == k3) {
        fit.middle_empty = true;
    } else {
        const Line mid = fit_line(m, k2, k3);
        fit.a[1] = mid.a;
        fit.b[1] = mid.b;
        fit.wsse += mid.sse;
    }
    fit.wsse += last.sse;
    return fit;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct Summary {
    double mean = 0.0, var = 0.0;  // var with divisor n - 1
};

Summary summarize(const std::vector<double>& v) {
    Summary s;
    for (double x : v) s.mean += x;
    s.mean /= static_cast<double>(v.size());
    for (double x : v) s.var += (x - s.mean) * (x - s.mean);
    s.var /= static_cast<double>(v.size() - 1);
    return s;
}

double two_sided_p(double t, double df) {
    const boost::math::students_t dist(df);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

using ParamGetter = double (*)(const PiecewiseFit&);
struct ParamRef {
    const char* name;
    ParamGetter get;
};

constexpr ParamRef kParams[] = {
    {"a1", [](const PiecewiseFit& f) { return f.a[0]; }},
    {"a2", [](const PiecewiseFit& f) { return f.a[1]; }},
    {"a3", [](const PiecewiseFit& f) { return f.a[2]; }},
    {"b1", [](const PiecewiseFit& f) { return f.b[0]; }},
    {"b2", [](const PiecewiseFit& f) { return f.b[1]; }},
    {"b3", [](const PiecewiseFit& f) { return f.b[2]; }},
    {"kappa2", [](const PiecewiseFit& f) { return f.kappa2; }},
    {"kappa3", [](const PiecewiseFit& f) { return f.kappa3; }},
};

std::vector<double> extract(const std::vector<PiecewiseFit>& fits, ParamGetter get) {
    std::vector<double> out;
    out.reserve(fits.size());
    for (const auto& f : fits) out.push_back(get(f));
    return out;
}

}  // namespace

SegmentFit fit_segments(const std::array<double, kGridSize>& curve, double kappa2, double kappa3,
                        bool weighted) {
    const int k2 = knot_index(kappa2, "kappa2");
    const int k3 = knot_index(kappa3, "kappa3");
    if (k2 > k3) throw ConfigError("kappa2 must not exceed kappa3");
    if (k2 < 2) throw ConfigError("first segment needs at least 2 grid points");
    if (k3 > kGridSize - 2) throw ConfigError("last segment needs at least 2 grid points");
    if (k3 - k2 == 1) throw ConfigError("middle segment has a single grid point");
    return segments_at(accumulate(curve, weighted), k2, k3);
}

PiecewiseFit fit_piecewise(const std::array<double, kGridSize>& curve,
                           std::optional<double> lambda_knot, bool weighted) {
    if (lambda_knot && *lambda_knot < 0.0) throw ConfigError("lambda_knot must be >= 0");
    const Moments m = accumulate(curve, weighted);

    // Candidate knots: kappa2 = 0.01j strictly below the boundary, kappa3 =
    // 0.01m strictly above it, with two points spared for each end segment.
    constexpr int kJLo = 2, kJHi = 99, kMLo = 101, kMHi = 198;
    constexpr int kJN = kJHi - kJLo + 1, kMN = kMHi - kMLo + 1;
    std::vector<double> base(kJN * kMN), penalty(kJN * kMN);
    {
        std::array<double, kJN> first_sse;
        std::array<double, kMN> last_sse;
        for (int j = kJLo; j <= kJHi; ++j) first_sse[j - kJLo] = fit_line(m, 0, j).sse;
        for (int mm = kMLo; mm <= kMHi; ++mm)
            last_sse[mm - kMLo] = fit_line(m, mm, kGridSize).sse;
        for (int j = kJLo; j <= kJHi; ++j) {
            const double d2 = 0.01 * j - 1.0;
            for (int mm = kMLo; mm <= kMHi; ++mm) {
                const double d3 = 0.01 * mm - 1.0;
                const int cell = (j - kJLo) * kMN + (mm - kMLo);
                base[cell] = first_sse[j - kJLo] + fit_line(m, j, mm).sse + last_sse[mm - kMLo];
                penalty[cell] = d2 * d2 + d3 * d3;
            }
        }
    }

    // argmin of the penalized criterion; ties (up to roundoff) counted so the
    // automatic ladder can demand a unique winner.
    const auto evaluate = [&](double lambda, int* best_cell, int* tie_count) {
        double best = base[0] + lambda * penalty[0];
        int arg = 0;
        for (int cell = 1; cell < kJN * kMN; ++cell) {
            const double v = base[cell] + lambda * penalty[cell];
            if (v < best) {
                best = v;
                arg = cell;
            }
        }
        const double tol = 1e-12 + 1e-9 * best;
        int ties = 0;
        for (int cell = 0; cell < kJN * kMN; ++cell)
            if (base[cell] + lambda * penalty[cell] - best <= tol) ++ties;
        *best_cell = arg;
        *tie_count = ties;
    };

    PiecewiseFit out;
    int cell = 0, ties = 0;
    if (lambda_knot) {
        out.lambda_knot = *lambda_knot;
        evaluate(*lambda_knot, &cell, &ties);
    } else {
        for (int t = 0; t <= 12; ++t) {
            out.lambda_knot = 1e-6 * std::pow(4.0, t);
            evaluate(out.lambda_knot, &cell, &ties);
            if (ties == 1) break;
        }
        out.lambda_fallback = ties > 1;
    }

    const int j = kJLo + cell / kMN;
    const int mm = kMLo + cell % kMN;
    out.kappa2 = 0.01 * j;
    out.kappa3 = 0.01 * mm;
    const SegmentFit seg = segments_at(m, j, mm);
    out.a = seg.a;
    out.b = seg.b;
    out.wsse = seg.wsse;

    // Unweighted fit quality on the analysis grid.
    double mean = 0.0;
    for (double v : curve) mean += v;
    mean /= kGridSize;
    double ss_res = 0.0, ss_tot = 0.0;
    for (int i = 0; i < kGridSize; ++i) {
        const double r = grid_r(i);
        const int s = i < j ? 0 : (i < mm ? 1 : 2);
        const double res = curve[i] - (seg.a[s] + seg.b[s] * r);
        ss_res += res * res;
        ss_tot += (curve[i] - mean) * (curve[i] - mean);
    }
    out.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return out;
}

GroupComparison compare_groups(const std::vector<PiecewiseFit>& fits_a,
                               const std::vector<PiecewiseFit>& fits_c) {
    if (fits_a.size() < 2 || fits_c.size() < 2)
        throw DataError("group comparison needs at least 2 fits per group");
    GroupComparison out;
    const double na = static_cast<double>(fits_a.size());
    const double nc = static_cast<double>(fits_c.size());
    for (const ParamRef& param : kParams) {
        const std::vector<double> va = extract(fits_a, param.get);
        const std::vector<double> vc = extract(fits_c, param.get);
        const Summary sa = summarize(va), sc = summarize(vc);
        ParameterTest test;
        test.name = param.name;
        test.mean_a = sa.mean;
        test.mean_c = sc.mean;
        test.median_a = median_of(va);
        test.median_c = median_of(vc);
        const double se2 = sa.var / na + sc.var / nc;
        if (se2 <= 0.0) {
            test.degenerate = true;
        } else {
            test.t = (sa.mean - sc.mean) / std::sqrt(se2);
            const double ta = sa.var / na, tc = sc.var / nc;
            test.df = se2 * se2 / (ta * ta / (na - 1.0) + tc * tc / (nc - 1.0));
            test.p = two_sided_p(test.t, test.df);
        }
        out.parameters.push_back(std::move(test));
    }
    return out;
}

GroupComparison compare_groups_paired(const std::vector<PiecewiseFit>& fits_first,
                                      const std::vector<PiecewiseFit>& fits_second) {
    if (fits_first.size() != fits_second.size())
        throw DataError("paired comparison needs aligned fit lists");
    if (fits_first.size() < 3) throw DataError("paired comparison needs at least 3 pairs");
    GroupComparison out;
    out.paired = true;
    const double n = static_cast<double>(fits_first.size());
    for (const ParamRef& param : kParams) {
        const std::vector<double> va = extract(fits_first, param.get);
        const std::vector<double> vc = extract(fits_second, param.get);
        std::vector<double> diff(va.size());
        for (size_t i = 0; i < va.size(); ++i) diff[i] = va[i] - vc[i];
        const Summary sd = summarize(diff);
        ParameterTest test;
        test.name = param.name;
        test.mean_a = summarize(va).mean;
        test.mean_c = summarize(vc).mean;
        test.median_a = median_of(va);
        test.median_c = median_of(vc);
        if (sd.var <= 0.0) {
            test.degenerate = true;
        } else {
            test.t = sd.mean / std::sqrt(sd.var / n);
            test.df = n - 1.0;
            test.p = two_sided_p(test.t, test.df);
        }
        out.parameters.push_back(std::move(test));
    }
    return out;
}

}  // namespace bdp
