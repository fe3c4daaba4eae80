// Command-line front end: batch runs plus single-stage utilities that read
// and write the same artifact formats the pipeline uses.
#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "bdprof/alignment.hpp"
#include "bdprof/boundary_io.hpp"
#include "bdprof/fda.hpp"
#include "bdprof/geometry.hpp"
#include "bdprof/image_io.hpp"
#include "bdprof/pda.hpp"
#include "bdprof/pipeline.hpp"
#include "bdprof/plm.hpp"
#include "bdprof/profiles.hpp"
#include "bdprof/reports.hpp"
#include "bdprof/synth.hpp"

namespace fs = std::filesystem;
using namespace bdp;

namespace {

bool verbose_enabled() {
    const char* v = std::getenv("BDPROF_VERBOSE");
    return v != nullptr && std::string(v) != "0" && std::string(v) != "";
}

void note(const std::string& message) {
    if (verbose_enabled()) std::cerr << "bdprof: " << message << "\n";
}

// BDPROF_THREADS is validated and reserved: every stage currently runs on one
// thread, so any positive value is accepted without changing behavior.
void check_thread_env() {
    const char* v = std::getenv("BDPROF_THREADS");
    if (v == nullptr || *v == '\0') return;
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (end == nullptr || *end != '\0' || n < 1)
        throw ConfigError("BDPROF_THREADS must be a positive integer, got '" + std::string(v) +
                          "'");
    note("BDPROF_THREADS=" + std::to_string(n) + " accepted (single-threaded stages)");
}

std::string join_out(const std::string& dir, const std::string& name) {
    fs::create_directories(dir);
    return (fs::path(dir) / name).string();
}

// Shared by the geometry and curves commands: smooth every boundary, drop the
// ones near the image edge, and keep the original file ids for reporting.
struct PreparedGeometry {
    LabeledImage image;
    std::vector<BoundaryCurve> kept;
    std::vector<int> kept_ids;
    BDMap map;
};

PreparedGeometry prepare_geometry(const std::string& image_path, const std::string& boundary_path,
                                  const std::map<std::string, int>& roles,
                                  std::optional<double> penalty, double margin) {
    PreparedGeometry out;
    WarningList warnings;
    out.image = read_image(image_path, roles, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w.code << ": " << w.detail << "\n";
    const BoundarySet set = read_boundaries(boundary_path);
    std::vector<BoundaryCurve> smoothed;
    for (const auto& poly : set.polygons)
        smoothed.push_back(smooth_boundary(poly, SmoothOptions{penalty, 1000}));
    const std::vector<int> keep =
        exclude_border_nuclei(smoothed, out.image.width, out.image.height, margin);
    for (int idx : keep) {
        out.kept.push_back(std::move(smoothed[idx]));
        out.kept_ids.push_back(set.ids[idx]);
    }
    if (out.kept.empty()) throw DataError("no nuclei remain after border exclusion");
    out.map = build_bd_map(out.kept, out.image.width, out.image.height);
    return out;
}

struct GeometryArgs {
    std::string image, boundaries, output = "bdprof_out";
    double margin = 5.0;
    std::optional<double> penalty;
};

void cmd_geometry(const GeometryArgs& a) {
    const PreparedGeometry g =
        prepare_geometry(a.image, a.boundaries, {}, a.penalty, a.margin);
    BoundarySet out_set;
    for (size_t i = 0; i < g.kept.size(); ++i) {
        out_set.polygons.push_back(g.kept[i].smoothed);
        out_set.ids.push_back(g.kept_ids[i]);
    }
    write_boundaries(join_out(a.output, "smoothed.json"), out_set);
    note("wrote " + join_out(a.output, "smoothed.json"));
    write_bd_map(join_out(a.output, "bd"), g.map);
    note("wrote " + join_out(a.output, "bd") + ".{f32,orbit.i32,json}");
}

struct CurvesArgs {
    std::string image, boundaries, channel = "marker", output = "bdprof_out";
    int plane = 0;
    double margin = 5.0;
    std::optional<double> penalty, lambda;
};

void cmd_curves(const CurvesArgs& a) {
    const PreparedGeometry g =
        prepare_geometry(a.image, a.boundaries, {{a.channel, a.plane}}, a.penalty, a.margin);
    std::vector<ProfileCloud> clouds;
    std::vector<ExpressionCurve> curves;
    for (size_t i = 0; i < g.kept.size(); ++i) {
        ProfileCloud cloud = extract_profile(g.image, g.map, static_cast<int>(i), a.channel);
        cloud.nucleus_id = g.kept_ids[i];
        ExpressionCurve curve = fit_expression_curve(cloud, a.lambda);
        curve.nucleus_id = g.kept_ids[i];
        clouds.push_back(std::move(cloud));
        curves.push_back(std::move(curve));
    }
    write_cloud_csv(join_out(a.output, "cloud.csv"), clouds);
    write_curves_csv(join_out(a.output, "curves.csv"), curves);
    note("wrote " + join_out(a.output, "curves.csv"));
}

struct RegisterArgs {
    std::string curves, output = "bdprof_out";
    RegisterOptions options;
};

void cmd_register(const RegisterArgs& a) {
    std::vector<ExpressionCurve> curves = read_curves_csv(a.curves);
    for (auto& c : curves) c = scale_curve(c);
    const RegistrationResult result = register_within(curves, a.options);
    for (const auto& w : result.warnings)
        std::cerr << "warning: " << w.code << ": " << w.detail << "\n";
    write_registration_json(join_out(a.output, "registration.json"), result);
    write_curves_csv(join_out(a.output, "registered.csv"), result.registered);
    note("wrote " + join_out(a.output, "registration.json"));
}

struct TestArgs {
    std::string curves_a, curves_c, output = "bdprof_out";
    int n_perm = 2000;
    double level = 0.975;
    uint64_t seed = 0;
    bool paired = false;
};

void cmd_test(const TestArgs& a) {
    const std::vector<ExpressionCurve> group_a = read_curves_csv(a.curves_a);
    const std::vector<ExpressionCurve> group_c = read_curves_csv(a.curves_c);
    TestCurve result;
    if (a.paired) {
        if (group_a.size() != group_c.size())
            throw DataError("paired test needs equally long curve lists, got " +
                            std::to_string(group_a.size()) + " and " +
                            std::to_string(group_c.size()));
        std::vector<std::pair<ExpressionCurve, ExpressionCurve>> pairs;
        for (size_t i = 0; i < group_a.size(); ++i)
            pairs.emplace_back(group_a[i], group_c[i]);
        result = paired_tcurve_and_band(pairs, a.n_perm, a.level, a.seed);
    } else {
        result = two_sample_test(group_a, group_c, a.n_perm, a.level, a.seed);
    }
    for (const auto& w : result.warnings)
        std::cerr << "warning: " << w.code << ": " << w.detail << "\n";
    write_test_json(join_out(a.output, "test.json"), result);
    note("wrote " + join_out(a.output, "test.json"));
}

struct DiscriminateArgs {
    std::string curves_a, curves_c, output = "bdprof_out";
    std::vector<double> lambda_grid, tau_grid;
};

void cmd_discriminate(const DiscriminateArgs& a) {
    const std::vector<ExpressionCurve> group_a = read_curves_csv(a.curves_a);
    const std::vector<ExpressionCurve> group_c = read_curves_csv(a.curves_c);
    const DiscriminantModel model =
        loocv_select(curve_matrix(group_a), curve_matrix(group_c),
                     a.lambda_grid.empty() ? default_lambda_grid() : a.lambda_grid,
                     a.tau_grid.empty() ? default_tau_grid() : a.tau_grid);
    write_discriminant_json(join_out(a.output, "discriminant.json"), model);
    note("wrote " + join_out(a.output, "discriminant.json"));
}

struct PiecewiseArgs {
    std::string curves, curves_b, output = "bdprof_out";
    std::optional<double> lambda_knot;
    bool paired = false;
};

void cmd_piecewise(const PiecewiseArgs& a) {
    const auto fit_file = [&](const std::string& path, const std::string& label,
                              std::vector<PiecewiseRow>& rows) {
        std::vector<PiecewiseFit> fits;
        for (const auto& c : read_curves_csv(path)) {
            PiecewiseFit fit = fit_piecewise(c.values, a.lambda_knot);
            rows.push_back({c.nucleus_id, c.channel, label, fit});
            fits.push_back(std::move(fit));
        }
        return fits;
    };
    std::vector<PiecewiseRow> rows;
    const std::vector<PiecewiseFit> fits_a = fit_file(a.curves, "a", rows);
    if (!a.curves_b.empty()) {
        const std::vector<PiecewiseFit> fits_b = fit_file(a.curves_b, "b", rows);
        const GroupComparison comparison =
            a.paired ? compare_groups_paired(fits_a, fits_b) : compare_groups(fits_a, fits_b);
        write_comparison_json(join_out(a.output, "comparison.json"), comparison);
        note("wrote " + join_out(a.output, "comparison.json"));
    } else if (a.paired) {
        throw ConfigError("--paired needs a second curve file");
    }
    write_piecewise_csv(join_out(a.output, "piecewise.csv"), rows);
    note("wrote " + join_out(a.output, "piecewise.csv"));
}

struct SynthArgs {
    std::string spec, output = "bdprof_out";
};

void cmd_synth(const SynthArgs& a) {
    const SynthSpec spec = parse_synth_spec(a.spec);
    const SynthResult result = generate(spec);
    write_synth_outputs(a.output, spec, result);
    note("wrote scene into " + a.output);
}

struct RunArgs {
    std::string config;
    std::string output;
    std::optional<uint64_t> seed;
    std::optional<int> n_perm;
    std::optional<double> band_level;
    bool timings = false;
};

void cmd_run(const RunArgs& a) {
    RunConfig config = parse_run_config(a.config);
    if (!a.output.empty()) config.output_dir = a.output;
    if (a.seed) config.seed = *a.seed;
    if (a.n_perm) config.n_perm = *a.n_perm;
    if (a.band_level) config.band_level = *a.band_level;
    if (a.timings) config.timings = true;
    validate_run_config(config);
    const RunManifest manifest = run_pipeline(config);
    for (const auto& s : manifest.stages) note("stage " + s.name + ": " + s.status);
    for (const auto& w : manifest.warnings)
        std::cerr << "warning: " << w.code << ": " << w.detail << "\n";
    note("wrote artifacts into " + config.output_dir);
}

// CLI11 stores into std::optional only through a plain value; these helpers
// keep "flag absent" distinguishable from "flag set to the default".
template <typename T>
void bind_optional(CLI::App* cmd, const std::string& flag, std::optional<T>& target,
                   const std::string& help) {
    cmd->add_option_function<T>(
           flag, [&target](const T& v) { target = v; }, help)
        ->expected(1);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Boundary-distance profiling of marker expression in cell images"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    app.footer(
        "Environment:\n"
        "  BDPROF_VERBOSE   non-empty and non-zero prints progress notes to stderr\n"
        "  BDPROF_THREADS   positive integer, validated and reserved; all stages\n"
        "                   currently run single-threaded\n"
        "Exit codes: 0 success, 1 configuration error, 2 data error, 3 numerical error.");

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "Execute the full batch pipeline from a JSON config");
    run->add_option("--config", run_args.config, "Run configuration JSON")->required();
    run->add_option("--output", run_args.output, "Override the configured output directory");
    bind_optional<uint64_t>(run, "--seed", run_args.seed, "Override the configured seed");
    bind_optional<int>(run, "--n-perm", run_args.n_perm, "Override the permutation count");
    bind_optional<double>(run, "--band-level", run_args.band_level,
                          "Override the simultaneous band level");
    run->add_flag("--timings", run_args.timings, "Record per-stage wall times in the manifest");
    run->callback([&] { cmd_run(run_args); });

    GeometryArgs geometry_args;
    auto* geometry =
        app.add_subcommand("geometry", "Smooth boundaries and export the scaled BD map");
    geometry->add_option("--image", geometry_args.image, "Input image (PGM/PPM/PAM)")->required();
    geometry->add_option("--boundaries", geometry_args.boundaries, "Boundary JSON")->required();
    geometry->add_option("--output", geometry_args.output, "Output directory");
    geometry->add_option("--margin", geometry_args.margin, "Border exclusion margin in pixels");
    bind_optional<double>(geometry, "--penalty", geometry_args.penalty,
                          "Boundary smoothing penalty (default: GCV)");
    geometry->callback([&] { cmd_geometry(geometry_args); });

    CurvesArgs curves_args;
    auto* curves =
        app.add_subcommand("curves", "Extract per-nucleus clouds and fit expression curves");
    curves->add_option("--image", curves_args.image, "Input image (PGM/PPM/PAM)")->required();
    curves->add_option("--boundaries", curves_args.boundaries, "Boundary JSON")->required();
    curves->add_option("--channel", curves_args.channel, "Channel role name");
    curves->add_option("--plane", curves_args.plane, "Image plane index for the channel");
    curves->add_option("--margin", curves_args.margin, "Border exclusion margin in pixels");
    bind_optional<double>(curves, "--penalty", curves_args.penalty,
                          "Boundary smoothing penalty (default: GCV)");
    bind_optional<double>(curves, "--lambda", curves_args.lambda,
                          "Spline penalty (default: GCV)");
    curves->add_option("--output", curves_args.output, "Output directory");
    curves->callback([&] { cmd_curves(curves_args); });

    RegisterArgs register_args;
    auto* register_cmd =
        app.add_subcommand("register", "Area-scale and Procrustes-register a curve set");
    register_cmd->add_option("--curves", register_args.curves, "Curves CSV")->required();
    register_cmd->add_option("--delta-lo", register_args.options.delta_lo, "Dilation lower bound");
    register_cmd->add_option("--delta-hi", register_args.options.delta_hi, "Dilation upper bound");
    register_cmd->add_option("--max-iter", register_args.options.max_iter, "Iteration cap");
    register_cmd->add_option("--tol", register_args.options.tol, "Relative descent tolerance");
    register_cmd->add_option("--line-tol", register_args.options.line_tol,
                             "Line-search bracket width");
    register_cmd
        ->add_flag_function("--unweighted",
                            [&](int64_t) { register_args.options.weighted = false; },
                            "Drop the density weight from the criterion")
        ->expected(0);
    register_cmd->add_option("--output", register_args.output, "Output directory");
    register_cmd->callback([&] { cmd_register(register_args); });

    TestArgs test_args;
    auto* test = app.add_subcommand("test", "Permutation band test between two curve sets");
    test->add_option("--curves-a", test_args.curves_a, "Group A curves CSV")->required();
    test->add_option("--curves-c", test_args.curves_c, "Group C curves CSV")->required();
    test->add_option("--n-perm", test_args.n_perm, "Permutation count (>= 1000)");
    test->add_option("--level", test_args.level, "Simultaneous band level in (0.5, 1)");
    test->add_option("--seed", test_args.seed, "Permutation seed");
    test->add_flag("--paired", test_args.paired, "Pair rows of the two files by order");
    test->add_option("--output", test_args.output, "Output directory");
    test->callback([&] { cmd_test(test_args); });

    DiscriminateArgs discriminate_args;
    auto* discriminate =
        app.add_subcommand("discriminate", "Ridge discriminant with leave-one-out selection");
    discriminate->add_option("--curves-a", discriminate_args.curves_a, "Group A curves CSV")
        ->required();
    discriminate->add_option("--curves-c", discriminate_args.curves_c, "Group C curves CSV")
        ->required();
    discriminate
        ->add_option("--lambda-grid", discriminate_args.lambda_grid,
                     "Comma-separated ridge penalties")
        ->delimiter(',');
    discriminate
        ->add_option("--tau-grid", discriminate_args.tau_grid, "Comma-separated thresholds")
        ->delimiter(',');
    discriminate->add_option("--output", discriminate_args.output, "Output directory");
    discriminate->callback([&] { cmd_discriminate(discriminate_args); });

    PiecewiseArgs piecewise_args;
    auto* piecewise =
        app.add_subcommand("piecewise", "Fit the three-segment linear model per curve");
    piecewise->add_option("--curves", piecewise_args.curves, "Curves CSV")->required();
    piecewise->add_option("--curves-b", piecewise_args.curves_b,
                          "Second curve set; adds the per-parameter comparison");
    bind_optional<double>(piecewise, "--lambda-knot", piecewise_args.lambda_knot,
                          "Knot penalty (default: automatic ladder)");
    piecewise->add_flag("--paired", piecewise_args.paired,
                        "Compare the two sets pairwise by row order");
    piecewise->add_option("--output", piecewise_args.output, "Output directory");
    piecewise->callback([&] { cmd_piecewise(piecewise_args); });

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "Render a scene with known ground truth");
    synth->add_option("--spec", synth_args.spec, "Scene spec JSON")->required();
    synth->add_option("--output", synth_args.output, "Output directory");
    synth->callback([&] { cmd_synth(synth_args); });

    try {
        check_thread_env();
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
