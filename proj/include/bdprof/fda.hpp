#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "bdprof/profiles.hpp"

namespace bdp {

enum class Design { unpaired, paired };

// Pointwise t-statistic curve.  Grid points whose pooled variance vanished
// carry t = 0 and are listed in `degenerate` (a sup-|t| band would otherwise
// blow up on constant tails).
struct TCurve {
    std::array<double, kGridSize> t{};
    std::vector<int> degenerate;
};

// T(r_i) = (mean_C - mean_A) / sqrt(var_C / n_C + var_A / n_A), sample
// moments taken across curves within each group (variance divisor n - 1).
// Requires at least 2 curves per group (DataError).  Inputs are expected to
// be scaled and registered; that is the caller's business.
TCurve two_sample_tcurve(const std::vector<ExpressionCurve>& group_a,
                         const std::vector<ExpressionCurve>& group_c);

struct BandResult {
    double critical = 0.0;  // level-quantile of sup |T| across permutations
    int n_perm = 0;         // replicates actually evaluated
    bool exact = false;     // complete enumeration replaced Monte Carlo
    WarningList warnings;
};

// Pools the two groups, resplits into the original sizes without replacement,
// and records sup_i |T(r_i)| per split.  The critical value is the
// level-quantile (index ceil(level * N) of the sorted suprema).  When the
// number of distinct splits is at most n_perm they are enumerated completely
// instead (with a warning).  Replicates are seeded per-index from `seed`, so
// the result does not depend on evaluation order.  n_perm >= 1000 and
// level in (0.5, 1) (ConfigError).
BandResult permutation_band(const std::vector<ExpressionCurve>& group_a,
                            const std::vector<ExpressionCurve>& group_c, int n_perm,
                            double level, uint64_t seed);

// Full test report: statistic curve, simultaneous band, and the maximal
// grid-aligned runs where |t| exceeds it.
struct TestCurve {
    Design design = Design::unpaired;
    std::array<double, kGridSize> t{};
    double critical = 0.0;
    double level = 0.0;
    int n_perm = 0;
    uint64_t seed = 0;
    bool exact = false;
    std::vector<std::pair<double, double>> significant_regions;  // [r_lo, r_hi]
    std::vector<int> degenerate;
    WarningList warnings;
};

// Maximal runs of consecutive grid points with |t| strictly above critical,
// reported as closed r-intervals.
std::vector<std::pair<double, double>> significant_regions(
    const std::array<double, kGridSize>& t, double critical);

TestCurve two_sample_test(const std::vector<ExpressionCurve>& group_a,
                          const std::vector<ExpressionCurve>& group_c, int n_perm,
                          double level, uint64_t seed);

// Paired design: pointwise one-sample t on the within-cell differences
// first - second, with the band generated by restricted randomization (each
// cell's labels independently swapped per replicate; enumerated exactly when
// 2^n <= n_perm).  Requires >= 3 pairs.
TestCurve paired_tcurve_and_band(
    const std::vector<std::pair<ExpressionCurve, ExpressionCurve>>& pairs, int n_perm,
    double level, uint64_t seed);

}  // namespace bdp
