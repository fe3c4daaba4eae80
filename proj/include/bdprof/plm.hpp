#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "bdprof/profiles.hpp"

namespace bdp {

// Weighted least-squares fit of three independent lines at fixed knots.
// Segment i covers grid points with kappa_i < r <= kappa_{i+1} (kappa_1 = 0,
// kappa_4 = 2).  No continuity is imposed across knots.
struct SegmentFit {
    std::array<double, 3> a{};  // intercepts
    std::array<double, 3> b{};  // slopes
    double wsse = 0.0;          // total weighted SSE across segments
    bool middle_empty = false;  // kappa2 == kappa3: two-piece degenerate fit
};

// Knots must lie on the 0.01 grid with 0 < kappa2 <= kappa3 < 2.  A segment
// with exactly one grid point is an error; an empty middle segment
// (kappa2 == kappa3) is allowed and flagged, with a_2 = b_2 = 0.
SegmentFit fit_segments(const std::array<double, kGridSize>& curve, double kappa2, double kappa3,
                        bool weighted = true);

struct PiecewiseFit {
    double kappa2 = 0.0, kappa3 = 0.0;
    std::array<double, 3> a{};
    std::array<double, 3> b{};
    double wsse = 0.0;
    double r_squared = 0.0;  // unweighted: 1 - SSE / total SS around the mean
    double lambda_knot = 0.0;
    bool lambda_fallback = false;  // no ladder value gave a unique minimizer
};

// Penalized knot search: the weighted criterion is evaluated over the grid
// kappa2 = 0.01j (j = 2..99), kappa3 = 0.01m (m = 101..198) — knot pairs on
// the infeasible side of the boundary, or leaving a one-point end segment,
// are excluded up front — plus lambda * ((kappa2 - 1)^2 + (1 - kappa3)^2),
// which pulls both knots toward the boundary and breaks flat-criterion ties.
// When lambda is not supplied it is the smallest value of the doubling ladder
// 1e-6 * 4^t, t = 0..12, whose penalized minimizer is unique; if none is,
// the largest rung is used and flagged.
PiecewiseFit fit_piecewise(const std::array<double, kGridSize>& curve,
                           std::optional<double> lambda_knot = std::nullopt,
                           bool weighted = true);

// Per-parameter two-sample comparison of fitted models across groups.
struct ParameterTest {
    std::string name;             // a1..a3, b1..b3, kappa2, kappa3
    double mean_a = 0.0, mean_c = 0.0;
    double median_a = 0.0, median_c = 0.0;
    double t = 0.0;
    double df = 0.0;
    std::optional<double> p;      // absent when the variance degenerates
    bool degenerate = false;
};

struct GroupComparison {
    bool paired = false;
    std::vector<ParameterTest> parameters;  // one entry per model parameter
};

// Welch two-sample t-test per parameter; needs >= 2 fits per group.
GroupComparison compare_groups(const std::vector<PiecewiseFit>& fits_a,
                               const std::vector<PiecewiseFit>& fits_c);

// Paired t-test on per-cell parameter differences; lists must be aligned and
// have >= 3 entries.
GroupComparison compare_groups_paired(const std::vector<PiecewiseFit>& fits_first,
                                      const std::vector<PiecewiseFit>& fits_second);

}  // namespace bdp
