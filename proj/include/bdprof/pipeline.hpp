#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bdprof/alignment.hpp"
#include "bdprof/common.hpp"
#include "bdprof/fda.hpp"

namespace bdp {

inline constexpr const char* kVersion = "0.1.0";

// One image with its boundary file.  Under the unpaired design every input
// carries one of the two group labels; under the paired design the label is
// unused (the two compared groups are channel roles within each image).
struct RunInput {
    std::string image_path;
    std::string boundary_path;
    std::string group;
};

struct RunConfig {
    Design design = Design::unpaired;
    std::vector<RunInput> inputs;
    std::map<std::string, int> channels;  // role name -> plane index in the image

    // Unpaired: the single role whose curves are analyzed.
    std::string analysis_channel = "marker";
    // Paired: the two roles compared within each cell.
    std::array<std::string, 2> paired_channels{"marker", "membrane"};

    double border_margin = 5.0;
    std::optional<double> boundary_penalty;  // absent -> per-boundary GCV
    std::optional<double> spline_lambda;     // absent -> per-curve GCV
    RegisterOptions registration;
    int n_perm = 2000;
    double band_level = 0.975;
    std::vector<double> pda_lambda_grid;  // empty -> module default
    std::vector<double> pda_tau_grid;     // empty -> module default
    std::optional<double> lambda_knot;    // absent -> automatic ladder
    std::uint64_t seed = 0;
    std::string output_dir = "bdprof_out";
    bool timings = false;  // per-stage wall times in the manifest (off keeps reruns byte-identical)
};

// Strict JSON parse: unknown keys, wrong types, and invalid combinations are
// ConfigError; unreadable or syntactically broken files are DataError.  The
// returned config has been semantically validated (two distinct labels for
// unpaired, two distinct known roles for paired, grids/levels in range).
RunConfig parse_run_config(const std::string& path);

// Re-checks a config assembled in code; parse_run_config calls this too.
void validate_run_config(const RunConfig& config);

struct StageRecord {
    std::string name;
    std::string status;  // "ok" or "failed"
    std::optional<double> elapsed_ms;
    std::string error;  // failure message when status == "failed"
};

struct RunManifest {
    std::string version;
    std::vector<StageRecord> stages;
    WarningList warnings;  // deduplicated union across all modules
    std::string failed_stage;  // empty on success
};

// Runs validate -> geometry -> curves -> scaling -> registration -> testing
// -> discriminant -> piecewise -> report.  Artifacts (CSV/JSON/SVG) are
// written into config.output_dir by the report stage; the manifest is written
// in every case, including stage failure, before the stage's exception is
// rethrown.  With a fixed config and seed the artifact tree is byte-identical
// across runs (unless timings are enabled).
RunManifest run_pipeline(const RunConfig& config);

}  // namespace bdp
