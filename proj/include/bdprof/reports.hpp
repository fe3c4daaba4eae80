#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bdprof/alignment.hpp"
#include "bdprof/fda.hpp"
#include "bdprof/geometry.hpp"
#include "bdprof/pda.hpp"
#include "bdprof/plm.hpp"
#include "bdprof/profiles.hpp"

namespace bdp {

// Artifact writers.  All output is deterministic: fixed column orders, %.12g
// numeric formatting in CSV, sorted keys in JSON, no timestamps.

// Header nucleus_id,channel,r,g; one row per grid point per curve.
void write_curves_csv(const std::string& path, const std::vector<ExpressionCurve>& curves);

// Header nucleus_id,channel,r,a; one row per cloud point.
void write_cloud_csv(const std::string& path, const std::vector<ProfileCloud>& clouds);

// Dilations, trace, per-curve scale/fit diagnostics, group means, warnings.
void write_registration_json(const std::string& path, const RegistrationResult& result);

// Several named registrations in one document (one per group), with the
// optional between-group dilation alongside.
void write_registration_groups_json(const std::string& path,
                                    const std::vector<std::string>& names,
                                    const std::vector<RegistrationResult>& results,
                                    std::optional<double> group_dilation);

// Parses a file written by write_curves_csv back into curves (values,
// nucleus_id, channel; fit metadata is not part of the CSV contract).  Rows
// of one curve must be contiguous and cover the grid in order (DataError).
std::vector<ExpressionCurve> read_curves_csv(const std::string& path);

// T-curve, critical value, significant regions, and the band parameters.
void write_test_json(const std::string& path, const TestCurve& test);

// Discriminant direction, selected penalty and threshold, CV details, scores.
void write_discriminant_json(const std::string& path, const DiscriminantModel& model);

struct PiecewiseRow {
    int nucleus_id = -1;
    std::string channel;
    std::string group;
    PiecewiseFit fit;
};

// Header nucleus_id,channel,group,kappa2,kappa3,a1,a2,a3,b1,b2,b3,wsse,
// r_squared,lambda_knot,lambda_fallback.
void write_piecewise_csv(const std::string& path, const std::vector<PiecewiseRow>& rows);

// Per-parameter test results of the model comparison.
void write_comparison_json(const std::string& path, const GroupComparison& comparison);

// bd as little-endian float32 (base.f32), orbit as little-endian int32
// (base.orbit.i32), plus a base.json sidecar with shapes, dtypes, and d_max.
void write_bd_map(const std::string& base_path, const BDMap& map);

}  // namespace bdp
