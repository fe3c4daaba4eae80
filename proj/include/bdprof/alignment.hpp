#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "bdprof/profiles.hpp"

namespace bdp {

struct RegisterOptions {
    double delta_lo = 0.7;
    double delta_hi = 1.3;
    int max_iter = 20;
    double tol = 1e-6;        // stop when the relative criterion decrease falls below this
    double line_tol = 1e-4;   // golden-section bracket width on delta
    bool weighted = true;     // apply density_weight(r) inside the criterion
};

// Output of the Procrustes registration.  `registered` holds the re-dilated
// curves in input order; for the paired variant it holds all first-channel
// curves followed by all second-channel curves, and mean_curves holds the two
// group means in the same order.
struct RegistrationResult {
    std::vector<double> dilations;                  // per-curve, geometric mean 1
    std::optional<double> group_dilation;           // between-group dilation, if computed
    std::vector<std::vector<double>> mean_curves;   // per group, on the analysis grid
    std::vector<double> sse_trace;                  // criterion before iterating, then per iteration
    std::vector<ExpressionCurve> registered;
    WarningList warnings;
};

// Divides the curve by its Riemann-sum area so it integrates to 1 over (0, 2].
// The scale field accumulates the factor, and an area within 1e-12 of 1 is
// left untouched, so re-scaling an already scaled curve is an exact no-op.
// Nonpositive area -> DataError.
ExpressionCurve scale_curve(const ExpressionCurve& curve);

// Pearson correlation of paired per-nucleus scale factors; a diagnostic for
// shared lighting artifacts across channels.  Requires equal lengths >= 3 and
// nonzero variance in both lists (DataError).
double scale_correlation(const std::vector<double>& scales_a, const std::vector<double>& scales_b);

// Returns r -> g(r * delta) resampled on the analysis grid by monotone cubic
// interpolation.  Arguments past the end of the grid (delta > 1) are linearly
// extrapolated from the last two grid values and flagged extrapolated_high.
// Requires 0.5 <= delta <= 2 (ConfigError).
ExpressionCurve dilate_curve(const ExpressionCurve& curve, double delta);

// Two-step Procrustes iteration: the group mean is the pointwise average of
// the current dilated curves, then each curve's dilation is refit by a golden
// line search over [delta_lo, delta_hi].  Inputs must be scaled to unit area.
// The criterion trace is checked for descent; an increase aborts with
// NumericError (it indicates an interpolation defect).  Dilations are
// normalized to geometric mean 1 after convergence.
RegistrationResult register_within(const std::vector<ExpressionCurve>& curves,
                                   const RegisterOptions& options = {});

// Single dilation aligning mean curve A onto mean curve C by an unweighted
// least-squares line search.
double register_between(const std::vector<double>& mean_a, const std::vector<double>& mean_c,
                        const RegisterOptions& options = {});

// Paired registration: one dilation per cell applied to both channels, fit
// against the two channel means jointly.
RegistrationResult register_paired(
    const std::vector<std::pair<ExpressionCurve, ExpressionCurve>>& pairs,
    const RegisterOptions& options = {});

}  // namespace bdp
