#include "bdprof/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bdprof/splines.hpp"

namespace bdp {
namespace {

// Golden-section minimization of f over [a, b]; returns argmin.
template <typename F>
double golden_min(F&& f, double a, double b, double tol) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    return fc < fd ? c : d;
}

std::vector<double> grid_weights(bool weighted) {
    std::vector<double> w(kGridSize, 1.0);
    if (weighted)
        for (int i = 0; i < kGridSize; ++i) w[i] = density_weight(grid_r(i));
    return w;
}

Pchip curve_pchip(const ExpressionCurve& curve) {
    std::vector<double> x(kGridSize), y(curve.values.begin(), curve.values.end());
    for (int i = 0; i < kGridSize; ++i) x[i] = grid_r(i);
    return Pchip(std::move(x), std::move(y));
}

// Riemann-sum criterion sum_i w_i (g(r_i * delta) - mu_i)^2 * 0.01.
double dilation_sse(const Pchip& g, double delta, const std::vector<double>& mu,
                    const std::vector<double>& w) {
    double sse = 0.0;
    for (int i = 0; i < kGridSize; ++i) {
        double d = g(grid_r(i) * delta) - mu[i];
        sse += w[i] * d * d;
    }
    return sse * kGridStep;
}

void check_scaled(const ExpressionCurve& curve) {
    double area = riemann_sum(std::vector<double>(curve.values.begin(), curve.values.end()));
    if (std::fabs(area - 1.0) > 1e-6)
        throw DataError("registration input is not scaled to unit area (area = " +
                        std::to_string(area) + ")");
}

void check_options(const RegisterOptions& opt) {
    if (!(opt.delta_lo > 0.0) || !(opt.delta_hi > opt.delta_lo))
        throw ConfigError("invalid dilation search interval");
    if (opt.max_iter < 1) throw ConfigError("max_iter must be >= 1");
}

[[noreturn]] void throw_divergence(const std::vector<double>& trace) {
    std::ostringstream msg;
    msg << "registration criterion increased; trace:";
    for (double v : trace) msg << " " << v;
    throw NumericError(msg.str());
}

void normalize_geomean(std::vector<double>& deltas) {
    double log_sum = 0.0;
    for (double d : deltas) log_sum += std::log(d);
    double geomean = std::exp(log_sum / deltas.size());
    for (double& d : deltas) d /= geomean;
}

void flag_bound_brackets(const std::vector<double>& deltas, const RegisterOptions& opt,
                         WarningList& warnings) {
    for (size_t k = 0; k < deltas.size(); ++k)
        if (deltas[k] <= opt.delta_lo + 2 * opt.line_tol ||
            deltas[k] >= opt.delta_hi - 2 * opt.line_tol)
            add_warning(warnings, {"dilation_bracket_bound",
                                   "curve " + std::to_string(k) + " hit the search interval edge"});
}

}  // namespace

ExpressionCurve scale_curve(const ExpressionCurve& curve) {
    double area = riemann_sum(std::vector<double>(curve.values.begin(), curve.values.end()));
    if (!(area > 0.0)) throw DataError("curve area must be positive to scale");
    // A curve that is already unit area up to summation roundoff is returned
    // untouched, which makes repeated scaling bit-stable.
    if (std::fabs(area - 1.0) <= 1e-12) return curve;
    ExpressionCurve out = curve;
    for (double& v : out.values) v /= area;
    out.scale = curve.scale * area;
    return out;
}

double scale_correlation(const std::vector<double>& scales_a, const std::vector<double>& scales_b) {
    if (scales_a.size() != scales_b.size()) throw DataError("scale lists differ in length");
    const size_t n = scales_a.size();
    if (n < 3) throw DataError("need at least 3 scale pairs");
    double ma = 0.0, mb = 0.0;
    for (size_t i = 0; i < n; ++i) {
        ma += scales_a[i];
        mb += scales_b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sab += (scales_a[i] - ma) * (scales_b[i] - mb);
        saa += (scales_a[i] - ma) * (scales_a[i] - ma);
        sbb += (scales_b[i] - mb) * (scales_b[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) throw DataError("scale list has zero variance");
    return sab / std::sqrt(saa * sbb);
}

ExpressionCurve dilate_curve(const ExpressionCurve& curve, double delta) {
    if (!(delta >= 0.5 && delta <= 2.0)) throw ConfigError("dilation must lie in [0.5, 2]");
    Pchip g = curve_pchip(curve);
    ExpressionCurve out = curve;
    for (int i = 0; i < kGridSize; ++i) out.values[i] = g(grid_r(i) * delta);
    out.dilation = curve.dilation * delta;
    if (g.eval_above()) out.extrapolated_high = true;
    return out;
}

RegistrationResult register_within(const std::vector<ExpressionCurve>& curves,
                                   const RegisterOptions& options) {
    check_options(options);
    if (curves.size() < 2) throw DataError("registration needs at least 2 curves");
    for (const auto& c : curves) check_scaled(c);
    const size_t nc = curves.size();
    const auto w = grid_weights(options.weighted);

    std::vector<Pchip> g;
    g.reserve(nc);
    for (const auto& c : curves) g.push_back(curve_pchip(c));

    RegistrationResult result;
    std::vector<double> deltas(nc, 1.0);
    std::vector<double> mu(kGridSize, 0.0);
    for (int iter = 0; iter < options.max_iter; ++iter) {
        // step 1: group mean of the currently dilated curves
        std::fill(mu.begin(), mu.end(), 0.0);
        for (size_t k = 0; k < nc; ++k)
            for (int i = 0; i < kGridSize; ++i) mu[i] += g[k](grid_r(i) * deltas[k]) / nc;
        if (iter == 0) {
            double sse0 = 0.0;
            for (size_t k = 0; k < nc; ++k) sse0 += dilation_sse(g[k], deltas[k], mu, w);
            result.sse_trace.push_back(sse0);
        }
        // step 2: per-curve line search, never worse than keeping the old value
        double sse = 0.0;
        for (size_t k = 0; k < nc; ++k) {
            auto crit = [&](double d) { return dilation_sse(g[k], d, mu, w); };
            double cand = golden_min(crit, options.delta_lo, options.delta_hi, options.line_tol);
            if (crit(cand) < crit(deltas[k])) deltas[k] = cand;
            sse += crit(deltas[k]);
        }
        double prev = result.sse_trace.back();
        result.sse_trace.push_back(sse);
        if (sse > prev * (1.0 + 1e-9) + 1e-15) throw_divergence(result.sse_trace);
        if (prev == 0.0 || (prev - sse) / prev < options.tol) break;
    }

    flag_bound_brackets(deltas, options, result.warnings);
    normalize_geomean(deltas);
    result.dilations = deltas;
    result.registered.reserve(nc);
    std::vector<double> mean(kGridSize, 0.0);
    for (size_t k = 0; k < nc; ++k) {
        result.registered.push_back(dilate_curve(curves[k], deltas[k]));
        for (int i = 0; i < kGridSize; ++i) mean[i] += result.registered[k].values[i] / nc;
    }
    result.mean_curves.push_back(std::move(mean));
    return result;
}

double register_between(const std::vector<double>& mean_a, const std::vector<double>& mean_c,
                        const RegisterOptions& options) {
    check_options(options);
    if (mean_a.size() != kGridSize || mean_c.size() != kGridSize)
        throw DataError("group means must live on the analysis grid");
    std::vector<double> x(kGridSize);
    for (int i = 0; i < kGridSize; ++i) x[i] = grid_r(i);
    Pchip a(x, mean_a);
    const std::vector<double> w(kGridSize, 1.0);
    auto crit = [&](double d) { return dilation_sse(a, d, mean_c, w); };
    double cand = golden_min(crit, options.delta_lo, options.delta_hi, options.line_tol);
    return crit(1.0) <= crit(cand) ? 1.0 : cand;
}

RegistrationResult register_paired(
    const std::vector<std::pair<ExpressionCurve, ExpressionCurve>>& pairs,
    const RegisterOptions& options) {
    check_options(options);
    if (pairs.size() < 2) throw DataError("paired registration needs at least 2 cells");
    for (const auto& [y, r] : pairs) {
        check_scaled(y);
        check_scaled(r);
    }
    const size_t nc = pairs.size();
    const auto w = grid_weights(options.weighted);

    std::vector<Pchip> gy, gr;
    gy.reserve(nc);
    gr.reserve(nc);
    for (const auto& [y, r] : pairs) {
        gy.push_back(curve_pchip(y));
        gr.push_back(curve_pchip(r));
    }

    RegistrationResult result;
    std::vector<double> deltas(nc, 1.0);
    std::vector<double> mu_y(kGridSize, 0.0), mu_r(kGridSize, 0.0);
    for (int iter = 0; iter < options.max_iter; ++iter) {
        std::fill(mu_y.begin(), mu_y.end(), 0.0);
        std::fill(mu_r.begin(), mu_r.end(), 0.0);
        for (size_t k = 0; k < nc; ++k)
            for (int i = 0; i < kGridSize; ++i) {
                mu_y[i] += gy[k](grid_r(i) * deltas[k]) / nc;
                mu_r[i] += gr[k](grid_r(i) * deltas[k]) / nc;
            }
        auto pair_sse = [&](size_t k, double d) {
            return dilation_sse(gy[k], d, mu_y, w) + dilation_sse(gr[k], d, mu_r, w);
        };
        if (iter == 0) {
            double sse0 = 0.0;
            for (size_t k = 0; k < nc; ++k) sse0 += pair_sse(k, deltas[k]);
            result.sse_trace.push_back(sse0);
        }
        double sse = 0.0;
        for (size_t k = 0; k < nc; ++k) {
            auto crit = [&](double d) { return pair_sse(k, d); };
            double cand = golden_min(crit, options.delta_lo, options.delta_hi, options.line_tol);
            if (crit(cand) < crit(deltas[k])) deltas[k] = cand;
            sse += crit(deltas[k]);
        }
        double prev = result.sse_trace.back();
        result.sse_trace.push_back(sse);
        if (sse > prev * (1.0 + 1e-9) + 1e-15) throw_divergence(result.sse_trace);
        if (prev == 0.0 || (prev - sse) / prev < options.tol) break;
    }

    flag_bound_brackets(deltas, options, result.warnings);
    normalize_geomean(deltas);
    result.dilations = deltas;
    result.registered.reserve(2 * nc);
    std::vector<double> mean_y(kGridSize, 0.0), mean_r(kGridSize, 0.0);
    for (size_t k = 0; k < nc; ++k) {
        result.registered.push_back(dilate_curve(pairs[k].first, deltas[k]));
        for (int i = 0; i < kGridSize; ++i) mean_y[i] += result.registered.back().values[i] / nc;
    }
    for (size_t k = 0; k < nc; ++k) {
        result.registered.push_back(dilate_curve(pairs[k].second, deltas[k]));
        for (int i = 0; i < kGridSize; ++i) mean_r[i] += result.registered.back().values[i] / nc;
    }
    result.mean_curves.push_back(std::move(mean_y));
    result.mean_curves.push_back(std::move(mean_r));
    return result;
}

}  // namespace bdp
