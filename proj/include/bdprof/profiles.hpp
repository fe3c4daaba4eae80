#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "bdprof/common.hpp"
#include "bdprof/geometry.hpp"
#include "bdprof/image.hpp"

namespace bdp {

// Raw (BD, intensity) point cloud of one nucleus orbit for one channel.
struct ProfileCloud {
    int nucleus_id = -1;
    std::string channel;
    std::vector<double> r;  // scaled boundary distance, in (0, 2]
    std::vector<double> a;  // raw channel intensity
};

// Average expression curve g on the fixed 200-point grid.
struct ExpressionCurve {
    int nucleus_id = -1;
    std::string channel;
    std::array<double, kGridSize> values{};
    double scale = 1.0;     // s_k, set by area scaling
    double dilation = 1.0;  // delta_k, set by registration

    // fit diagnostics
    double lambda = 0.0;
    double edf = 0.0;
    bool flat_gcv = false;
    bool low_coverage = false;       // data did not span [0.2, 1.5]
    bool extrapolated_low = false;   // grid extends below the observed r range
    bool extrapolated_high = false;  // grid extends above the observed r range
};

// One point per orbit pixel of the nucleus: r = bd value, a = raw intensity.
// Pixels with bd outside (0, 2] are excluded (the single deepest pixel has
// bd = 0 and does not enter).  Errors: unknown channel role (ConfigError),
// empty orbit (DataError).
ProfileCloud extract_profile(const LabeledImage& image, const BDMap& bdmap, int nucleus_id,
                             const std::string& channel);

// Cubic smoothing spline fit of the cloud, minimizing
//   sum_points (a - g(r))^2 + lambda int (g'')^2,
// lambda by GCV when not supplied.  Duplicate r values are aggregated exactly
// (weight = multiplicity, response = mean); clouds with more than 400 distinct
// values are binned to 400 equal-width bins first.  The curve is the spline
// evaluated on the analysis grid; evaluation outside the observed r range is
// the spline's linear continuation and is flagged.
ExpressionCurve fit_expression_curve(const ProfileCloud& cloud,
                                     std::optional<double> lambda_spline = std::nullopt);

// Density model for BD values under the area heuristic: proportional to r on
// (0, 1], constant on (1, 2].
struct DensityModel {
    static double f(double r);
};

// Registration weight w(r) = f(r)^0.75: r^0.75 on (0, 1), 1 on [1, 2].
// Throws std::invalid_argument outside (0, 2].
double density_weight(double r);

}  // namespace bdp
