#include "bdprof/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bdprof/splines.hpp"

namespace bdp {

const Raster<double>& LabeledImage::plane_for(const std::string& role) const {
    auto it = roles.find(role);
    if (it == roles.end()) throw ConfigError("no channel configured for role '" + role + "'");
    if (it->second < 0 || it->second >= static_cast<int>(planes.size()))
        throw ConfigError("channel index for role '" + role + "' is out of range");
    return planes[it->second];
}

ProfileCloud extract_profile(const LabeledImage& image, const BDMap& bdmap, int nucleus_id,
                             const std::string& channel) {
    const Raster<double>& plane = image.plane_for(channel);
    if (plane.width != bdmap.bd.width || plane.height != bdmap.bd.height)
        throw DataError("image and bd map dimensions differ");

    ProfileCloud cloud;
    cloud.nucleus_id = nucleus_id;
    cloud.channel = channel;
    for (size_t i = 0; i < bdmap.bd.data.size(); ++i) {
        if (bdmap.orbit.data[i] != nucleus_id) continue;
        double r = bdmap.bd.data[i];
        if (r <= 0.0 || r > 2.0) continue;
        cloud.r.push_back(r);
        cloud.a.push_back(plane.data[i]);
    }
    if (cloud.r.empty()) throw DataError("nucleus " + std::to_string(nucleus_id) + " has an empty orbit");
    return cloud;
}

namespace {

struct Aggregated {
    std::vector<double> knots, means, weights;
    double within_ss = 0.0;
};

// Exact aggregation by distinct r; clouds with more than max_knots distinct
// values are binned to max_knots equal-width bins (knot = mean r in bin).
Aggregated aggregate_cloud(const ProfileCloud& cloud, size_t max_knots) {
    const size_t n = cloud.r.size();
    std::vector<size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return cloud.r[a] < cloud.r[b]; });

    Aggregated out;
    size_t distinct = 0;
    for (size_t i = 0; i < n; ++i)
        if (i == 0 || cloud.r[idx[i]] != cloud.r[idx[i - 1]]) ++distinct;

    if (distinct <= max_knots) {
        size_t i = 0;
        while (i < n) {
            size_t j = i;
            double sum = 0.0;
            while (j < n && cloud.r[idx[j]] == cloud.r[idx[i]]) sum += cloud.a[idx[j++]];
            double cnt = static_cast<double>(j - i);
            double mean = sum / cnt;
            for (size_t k = i; k < j; ++k) out.within_ss += (cloud.a[idx[k]] - mean) * (cloud.a[idx[k]] - mean);
            out.knots.push_back(cloud.r[idx[i]]);
            out.means.push_back(mean);
            out.weights.push_back(cnt);
            i = j;
        }
        return out;
    }

    const double lo = cloud.r[idx.front()], hi = cloud.r[idx.back()];
    const double width = (hi - lo) / static_cast<double>(max_knots);
    size_t i = 0;
    for (size_t b = 0; b < max_knots && i < n; ++b) {
        double edge = (b + 1 == max_knots) ? hi : lo + width * (b + 1);
        size_t j = i;
        double sum_a = 0.0, sum_r = 0.0;
        while (j < n && (cloud.r[idx[j]] <= edge || b + 1 == max_knots)) {
            sum_a += cloud.a[idx[j]];
            sum_r += cloud.r[idx[j]];
            ++j;
        }
        if (j > i) {
            double cnt = static_cast<double>(j - i);
            double mean = sum_a / cnt;
            for (size_t k = i; k < j; ++k) out.within_ss += (cloud.a[idx[k]] - mean) * (cloud.a[idx[k]] - mean);
            out.knots.push_back(sum_r / cnt);
            out.means.push_back(mean);
            out.weights.push_back(cnt);
            i = j;
        }
    }
    return out;
}

}  // namespace

ExpressionCurve fit_expression_curve(const ProfileCloud& cloud, std::optional<double> lambda_spline) {
    const size_t n = cloud.r.size();
    if (n < 50) throw DataError("expression fit needs at least 50 points, got " + std::to_string(n));
    for (size_t i = 0; i < n; ++i)
        if (!(cloud.r[i] > 0.0) || cloud.r[i] > 2.0) throw DataError("profile r outside (0, 2]");
    if (lambda_spline && !(*lambda_spline >= 0)) throw ConfigError("spline penalty must be >= 0");

    Aggregated agg = aggregate_cloud(cloud, 400);
    if (agg.knots.size() < 4) throw DataError("expression fit needs at least 4 distinct r values");

    SmoothingSpline spline(agg.knots, agg.means, agg.weights);
    ExpressionCurve curve;
    if (lambda_spline) {
        spline.fit(*lambda_spline);
    } else {
        spline.fit_gcv(agg.within_ss, static_cast<double>(n));
        curve.flat_gcv = spline.flat_gcv();
    }

    curve.nucleus_id = cloud.nucleus_id;
    curve.channel = cloud.channel;
    curve.lambda = spline.lambda();
    curve.edf = spline.edf();
    const double r_lo = agg.knots.front(), r_hi = agg.knots.back();
    curve.low_coverage = (r_lo > 0.2 || r_hi < 1.5);
    for (int i = 0; i < kGridSize; ++i) {
        double r = grid_r(i);
        curve.values[i] = spline(r);
        if (r < r_lo) curve.extrapolated_low = true;
        if (r > r_hi) curve.extrapolated_high = true;
    }
    for (double v : curve.values)
        if (!std::isfinite(v)) throw NumericError("expression curve has non-finite values");
    return curve;
}

double DensityModel::f(double r) {
    if (!(r > 0.0) || r > 2.0) throw std::invalid_argument("density model defined on (0, 2]");
    return r <= 1.0 ? r : 1.0;
}

double density_weight(double r) {
    if (!(r > 0.0) || r > 2.0) throw std::invalid_argument("density weight defined on (0, 2]");
    return r < 1.0 ? std::pow(r, 0.75) : 1.0;
}

}  // namespace bdp
