#include "bdprof/fda.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bdprof/rng.hpp"

namespace bdp {
namespace {

using Row = std::array<double, kGridSize>;

// Two-pass mean/variance per grid point for one side of a split.
void group_moments(const std::vector<const Row*>& rows, Row& mean, Row& var) {
    const size_t n = rows.size();
    mean.fill(0.0);
    for (const Row* r : rows)
        for (int i = 0; i < kGridSize; ++i) mean[i] += (*r)[i];
    for (int i = 0; i < kGridSize; ++i) mean[i] /= n;
    var.fill(0.0);
    for (const Row* r : rows)
        for (int i = 0; i < kGridSize; ++i) {
            double d = (*r)[i] - mean[i];
            var[i] += d * d;
        }
    for (int i = 0; i < kGridSize; ++i) var[i] /= (n - 1);
}

// t curve for a split given as row pointers; degenerate points get t = 0 and
// are appended to *degenerate when it is non-null.
void split_tcurve(const std::vector<const Row*>& a, const std::vector<const Row*>& c, Row& t,
                  std::vector<int>* degenerate) {
    Row mean_a, var_a, mean_c, var_c;
    group_moments(a, mean_a, var_a);
    group_moments(c, mean_c, var_c);
    for (int i = 0; i < kGridSize; ++i) {
        double denom2 = var_c[i] / c.size() + var_a[i] / a.size();
        if (denom2 <= 0.0) {
            t[i] = 0.0;
            if (degenerate) degenerate->push_back(i);
        } else {
            t[i] = (mean_c[i] - mean_a[i]) / std::sqrt(denom2);
        }
    }
}

double sup_abs(const Row& t) {
    double s = 0.0;
    for (double v : t) s = std::max(s, std::fabs(v));
    return s;
}

// Quantile convention: index ceil(level * N), 1-based, of the sorted sample.
double level_quantile(std::vector<double>& values, double level) {
    std::sort(values.begin(), values.end());
    size_t idx = static_cast<size_t>(std::ceil(level * values.size()));
    idx = std::min(std::max<size_t>(idx, 1), values.size());
    return values[idx - 1];
}

void check_band_args(int n_perm, double level) {
    if (n_perm < 1000) throw ConfigError("permutation count must be at least 1000");
    if (!(level > 0.5 && level < 1.0)) throw ConfigError("band level must lie in (0.5, 1)");
}

// C(n, k) capped so the comparison against n_perm cannot overflow.
long long binomial_capped(int n, int k, long long cap) {
    long long r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > cap) return cap + 1;
    }
    return r;
}

// One-sample t on difference rows; mean / (sd / sqrt(n)).
void paired_tcurve(const std::vector<Row>& diffs, const std::vector<int>& signs, Row& t,
                   std::vector<int>* degenerate) {
    const size_t n = diffs.size();
    Row mean{}, var{};
    for (size_t k = 0; k < n; ++k)
        for (int i = 0; i < kGridSize; ++i) mean[i] += signs[k] * diffs[k][i];
    for (int i = 0; i < kGridSize; ++i) mean[i] /= n;
    for (size_t k = 0; k < n; ++k)
        for (int i = 0; i < kGridSize; ++i) {
            double d = signs[k] * diffs[k][i] - mean[i];
            var[i] += d * d;
        }
    for (int i = 0; i < kGridSize; ++i) {
        double denom2 = var[i] / (n - 1) / n;
        if (denom2 <= 0.0) {
            t[i] = 0.0;
            if (degenerate) degenerate->push_back(i);
        } else {
            t[i] = mean[i] / std::sqrt(denom2);
        }
    }
}

}  // namespace

TCurve two_sample_tcurve(const std::vector<ExpressionCurve>& group_a,
                         const std::vector<ExpressionCurve>& group_c) {
    if (group_a.size() < 2 || group_c.size() < 2)
        throw DataError("each group needs at least 2 curves");
    std::vector<const Row*> a, c;
    for (const auto& g : group_a) a.push_back(&g.values);
    for (const auto& g : group_c) c.push_back(&g.values);
    TCurve out;
    split_tcurve(a, c, out.t, &out.degenerate);
    return out;
}

BandResult permutation_band(const std::vector<ExpressionCurve>& group_a,
                            const std::vector<ExpressionCurve>& group_c, int n_perm,
                            double level, uint64_t seed) {
    check_band_args(n_perm, level);
    if (group_a.size() < 2 || group_c.size() < 2)
        throw DataError("each group needs at least 2 curves");
    const int na = static_cast<int>(group_a.size());
    const int n = na + static_cast<int>(group_c.size());

    std::vector<const Row*> pooled;
    for (const auto& g : group_a) pooled.push_back(&g.values);
    for (const auto& g : group_c) pooled.push_back(&g.values);

    BandResult result;
    std::vector<double> sups;
    Row t;
    std::vector<const Row*> a(na), c(n - na);

    long long total = binomial_capped(n, na, n_perm);
    if (total <= n_perm) {
        // complete enumeration of the C(n, na) splits, lexicographic order
        add_warning(result.warnings,
                    {"exact_enumeration", "all " + std::to_string(total) +
                                              " distinct splits enumerated instead of sampling"});
        std::vector<int> pick(na);
        std::iota(pick.begin(), pick.end(), 0);
        while (true) {
            std::vector<bool> in_a(n, false);
            for (int i = 0; i < na; ++i) {
                a[i] = pooled[pick[i]];
                in_a[pick[i]] = true;
            }
            int j = 0;
            for (int i = 0; i < n; ++i)
                if (!in_a[i]) c[j++] = pooled[i];
            split_tcurve(a, c, t, nullptr);
            sups.push_back(sup_abs(t));
            // advance to the next combination
            int i = na - 1;
            while (i >= 0 && pick[i] == n - na + i) --i;
            if (i < 0) break;
            ++pick[i];
            for (int k = i + 1; k < na; ++k) pick[k] = pick[k - 1] + 1;
        }
        result.exact = true;
    } else {
        std::vector<int> idx(n);
        for (int rep = 0; rep < n_perm; ++rep) {
            auto rng = make_rng(seed, static_cast<uint64_t>(rep));
            std::iota(idx.begin(), idx.end(), 0);
            std::shuffle(idx.begin(), idx.end(), rng);
            for (int i = 0; i < na; ++i) a[i] = pooled[idx[i]];
            for (int i = na; i < n; ++i) c[i - na] = pooled[idx[i]];
            split_tcurve(a, c, t, nullptr);
            sups.push_back(sup_abs(t));
        }
    }

    result.n_perm = static_cast<int>(sups.size());
    result.critical = level_quantile(sups, level);
    if (result.critical <= 0.0)
        add_warning(result.warnings,
                    {"degenerate_band", "all permutation suprema are zero; band is uninformative"});
    return result;
}

std::vector<std::pair<double, double>> significant_regions(const std::array<double, kGridSize>& t,
                                                           double critical) {
    std::vector<std::pair<double, double>> regions;
    int start = -1;
    for (int i = 0; i <= kGridSize; ++i) {
        bool on = i < kGridSize && std::fabs(t[i]) > critical;
        if (on && start < 0) start = i;
        if (!on && start >= 0) {
            regions.emplace_back(grid_r(start), grid_r(i - 1));
            start = -1;
        }
    }
    return regions;
}

TestCurve two_sample_test(const std::vector<ExpressionCurve>& group_a,
                          const std::vector<ExpressionCurve>& group_c, int n_perm, double level,
                          uint64_t seed) {
    TestCurve out;
    out.design = Design::unpaired;
    out.level = level;
    out.seed = seed;
    auto tc = two_sample_tcurve(group_a, group_c);
    out.t = tc.t;
    out.degenerate = std::move(tc.degenerate);
    auto band = permutation_band(group_a, group_c, n_perm, level, seed);
    out.critical = band.critical;
    out.n_perm = band.n_perm;
    out.exact = band.exact;
    out.warnings = std::move(band.warnings);
    out.significant_regions = significant_regions(out.t, out.critical);
    return out;
}

TestCurve paired_tcurve_and_band(
    const std::vector<std::pair<ExpressionCurve, ExpressionCurve>>& pairs, int n_perm,
    double level, uint64_t seed) {
    check_band_args(n_perm, level);
    if (pairs.size() < 3) throw DataError("paired test needs at least 3 pairs");
    const int n = static_cast<int>(pairs.size());

    std::vector<Row> diffs(n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < kGridSize; ++i)
            diffs[k][i] = pairs[k].first.values[i] - pairs[k].second.values[i];

    TestCurve out;
    out.design = Design::paired;
    out.level = level;
    out.seed = seed;
    std::vector<int> signs(n, 1);
    paired_tcurve(diffs, signs, out.t, &out.degenerate);

    std::vector<double> sups;
    Row t;
    bool exact = n < 62 && (1LL << n) <= n_perm;
    if (exact) {
        long long total = 1LL << n;
        add_warning(out.warnings,
                    {"exact_enumeration", "all " + std::to_string(total) +
                                              " sign assignments enumerated instead of sampling"});
        for (long long v = 0; v < total; ++v) {
            for (int k = 0; k < n; ++k) signs[k] = (v >> k) & 1 ? -1 : 1;
            paired_tcurve(diffs, signs, t, nullptr);
            sups.push_back(sup_abs(t));
        }
        out.exact = true;
    } else {
        for (int rep = 0; rep < n_perm; ++rep) {
            auto rng = make_rng(seed, static_cast<uint64_t>(rep));
            for (int k = 0; k < n; ++k) signs[k] = (rng() & 1) ? -1 : 1;
            paired_tcurve(diffs, signs, t, nullptr);
            sups.push_back(sup_abs(t));
        }
    }

    out.n_perm = static_cast<int>(sups.size());
    out.critical = level_quantile(sups, level);
    if (out.critical <= 0.0)
        add_warning(out.warnings,
                    {"degenerate_band", "all permutation suprema are zero; band is uninformative"});
    out.significant_regions = significant_regions(out.t, out.critical);
    return out;
}

}  // namespace bdp
