#include "bdprof/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>

#include "bdprof/boundary_io.hpp"
#include "bdprof/fda.hpp"
#include "bdprof/geometry.hpp"
#include "bdprof/image_io.hpp"
#include "bdprof/pda.hpp"
#include "bdprof/plm.hpp"
#include "bdprof/profiles.hpp"
#include "bdprof/reports.hpp"
#include "bdprof/svg_plot.hpp"

namespace bdp {

using nlohmann::json;

namespace {

json load_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open run config: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw DataError(path + ": " + e.what());
    }
}

void reject_unknown(const json& j, const std::string& what,
                    std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        bool known = false;
        for (const char* a : allowed) known = known || key == a;
        if (!known) throw ConfigError(what + ": unknown key '" + key + "'");
    }
}

double get_number(const json& j, const std::string& what) {
    if (!j.is_number()) throw ConfigError(what + " must be a number");
    return j.get<double>();
}

std::string get_string(const json& j, const std::string& what) {
    if (!j.is_string()) throw ConfigError(what + " must be a string");
    return j.get<std::string>();
}

std::string design_name(Design d) { return d == Design::paired ? "paired" : "unpaired"; }

json config_to_json(const RunConfig& c) {
    json inputs = json::array();
    for (const auto& in : c.inputs)
        inputs.push_back(
            {{"image", in.image_path}, {"boundaries", in.boundary_path}, {"group", in.group}});
    json doc{{"design", design_name(c.design)},
             {"inputs", std::move(inputs)},
             {"channels", c.channels},
             {"analysis_channel", c.analysis_channel},
             {"paired_channels", {c.paired_channels[0], c.paired_channels[1]}},
             {"border_margin", c.border_margin},
             {"boundary_penalty", c.boundary_penalty ? json(*c.boundary_penalty) : json()},
             {"spline_lambda", c.spline_lambda ? json(*c.spline_lambda) : json()},
             {"registration",
              {{"delta_lo", c.registration.delta_lo},
               {"delta_hi", c.registration.delta_hi},
               {"max_iter", c.registration.max_iter},
               {"tol", c.registration.tol},
               {"line_tol", c.registration.line_tol},
               {"weighted", c.registration.weighted}}},
             {"n_perm", c.n_perm},
             {"band_level", c.band_level},
             {"pda_lambda_grid", c.pda_lambda_grid},
             {"pda_tau_grid", c.pda_tau_grid},
             {"lambda_knot", c.lambda_knot ? json(*c.lambda_knot) : json()},
             {"seed", c.seed},
             {"output_dir", c.output_dir},
             {"timings", c.timings}};
    return doc;
}

// Sorted distinct group labels of an unpaired config (validated to be 2).
std::array<std::string, 2> group_labels(const RunConfig& c) {
    std::set<std::string> labels;
    for (const auto& in : c.inputs) labels.insert(in.group);
    auto it = labels.begin();
    std::array<std::string, 2> out{*it, *std::next(it)};
    return out;
}

}  // namespace

void validate_run_config(const RunConfig& c) {
    if (c.inputs.empty()) throw ConfigError("run config has no inputs");
    if (c.channels.empty()) throw ConfigError("run config has no channel roles");
    for (const auto& [role, plane] : c.channels) {
        if (role.empty()) throw ConfigError("channel role names must be non-empty");
        if (plane < 0) throw ConfigError("channel '" + role + "' has a negative plane index");
    }
    for (size_t i = 0; i < c.inputs.size(); ++i) {
        if (c.inputs[i].image_path.empty() || c.inputs[i].boundary_path.empty())
            throw ConfigError("inputs[" + std::to_string(i) + "] needs image and boundary paths");
    }
    if (c.design == Design::unpaired) {
        std::set<std::string> labels;
        for (const auto& in : c.inputs) {
            if (in.group.empty())
                throw ConfigError("unpaired design: every input needs a group label");
            labels.insert(in.group);
        }
        if (labels.size() != 2)
            throw ConfigError("unpaired design needs exactly 2 distinct group labels, got " +
                              std::to_string(labels.size()));
        if (!c.channels.count(c.analysis_channel))
            throw ConfigError("analysis channel '" + c.analysis_channel +
                              "' is not a configured role");
    } else {
        if (c.paired_channels[0] == c.paired_channels[1])
            throw ConfigError("paired design needs two distinct channel roles");
        for (const auto& role : c.paired_channels)
            if (!c.channels.count(role))
                throw ConfigError("paired channel '" + role + "' is not a configured role");
    }
    if (!(c.border_margin >= 0.0) || !std::isfinite(c.border_margin))
        throw ConfigError("border_margin must be finite and non-negative");
    if (c.boundary_penalty && !(*c.boundary_penalty > 0.0))
        throw ConfigError("boundary_penalty must be positive");
    if (c.spline_lambda && !(*c.spline_lambda > 0.0))
        throw ConfigError("spline_lambda must be positive");
    const auto& r = c.registration;
    if (!(r.delta_lo >= 0.5 && r.delta_lo < 1.0 && r.delta_hi > 1.0 && r.delta_hi <= 2.0))
        throw ConfigError("registration bracket must satisfy 0.5 <= delta_lo < 1 < delta_hi <= 2");
    if (r.max_iter < 1 || !(r.tol > 0.0) || !(r.line_tol > 0.0))
        throw ConfigError("registration iteration controls must be positive");
    if (c.n_perm < 1000) throw ConfigError("n_perm must be at least 1000");
    if (!(c.band_level > 0.5 && c.band_level < 1.0))
        throw ConfigError("band_level must lie in (0.5, 1)");
    for (double v : c.pda_lambda_grid)
        if (!(v > 0.0) || !std::isfinite(v))
            throw ConfigError("pda_lambda_grid values must be positive and finite");
    for (double v : c.pda_tau_grid)
        if (!std::isfinite(v)) throw ConfigError("pda_tau_grid values must be finite");
    if (c.lambda_knot && (!(*c.lambda_knot >= 0.0) || !std::isfinite(*c.lambda_knot)))
        throw ConfigError("lambda_knot must be finite and non-negative");
    if (c.output_dir.empty()) throw ConfigError("output_dir must be non-empty");
}

RunConfig parse_run_config(const std::string& path) {
    const json j = load_json(path);
    if (!j.is_object()) throw ConfigError("run config must be a JSON object");
    reject_unknown(j, "run config",
                   {"design", "inputs", "channels", "analysis_channel", "paired_channels",
                    "border_margin", "boundary_penalty", "spline_lambda", "registration", "n_perm",
                    "band_level", "pda_lambda_grid", "pda_tau_grid", "lambda_knot", "seed",
                    "output_dir", "timings"});

    RunConfig c;
    if (j.contains("design")) {
        const std::string d = get_string(j.at("design"), "design");
        if (d == "unpaired")
            c.design = Design::unpaired;
        else if (d == "paired")
            c.design = Design::paired;
        else
            throw ConfigError("design must be 'unpaired' or 'paired', got '" + d + "'");
    }

    if (!j.contains("inputs") || !j.at("inputs").is_array())
        throw ConfigError("run config needs an 'inputs' array");
    for (size_t i = 0; i < j.at("inputs").size(); ++i) {
        const json& in = j.at("inputs")[i];
        const std::string what = "inputs[" + std::to_string(i) + "]";
        if (!in.is_object()) throw ConfigError(what + " must be an object");
        reject_unknown(in, what, {"image", "boundaries", "group"});
        RunInput ri;
        if (!in.contains("image") || !in.contains("boundaries"))
            throw ConfigError(what + " needs 'image' and 'boundaries'");
        ri.image_path = get_string(in.at("image"), what + ".image");
        ri.boundary_path = get_string(in.at("boundaries"), what + ".boundaries");
        if (in.contains("group")) ri.group = get_string(in.at("group"), what + ".group");
        c.inputs.push_back(std::move(ri));
    }

    if (!j.contains("channels") || !j.at("channels").is_object())
        throw ConfigError("run config needs a 'channels' object");
    for (const auto& [role, plane] : j.at("channels").items()) {
        if (!plane.is_number_integer())
            throw ConfigError("channels." + role + " must be an integer plane index");
        c.channels[role] = plane.get<int>();
    }

    if (j.contains("analysis_channel"))
        c.analysis_channel = get_string(j.at("analysis_channel"), "analysis_channel");
    if (j.contains("paired_channels")) {
        const json& p = j.at("paired_channels");
        if (!p.is_array() || p.size() != 2)
            throw ConfigError("paired_channels must be an array of 2 role names");
        c.paired_channels[0] = get_string(p[0], "paired_channels[0]");
        c.paired_channels[1] = get_string(p[1], "paired_channels[1]");
    }
    if (j.contains("border_margin"))
        c.border_margin = get_number(j.at("border_margin"), "border_margin");
    if (j.contains("boundary_penalty") && !j.at("boundary_penalty").is_null())
        c.boundary_penalty = get_number(j.at("boundary_penalty"), "boundary_penalty");
    if (j.contains("spline_lambda") && !j.at("spline_lambda").is_null())
        c.spline_lambda = get_number(j.at("spline_lambda"), "spline_lambda");
    if (j.contains("registration")) {
        const json& r = j.at("registration");
        if (!r.is_object()) throw ConfigError("registration must be an object");
        reject_unknown(r, "registration",
                       {"delta_lo", "delta_hi", "max_iter", "tol", "line_tol", "weighted"});
        if (r.contains("delta_lo"))
            c.registration.delta_lo = get_number(r.at("delta_lo"), "registration.delta_lo");
        if (r.contains("delta_hi"))
            c.registration.delta_hi = get_number(r.at("delta_hi"), "registration.delta_hi");
        if (r.contains("max_iter")) {
            if (!r.at("max_iter").is_number_integer())
                throw ConfigError("registration.max_iter must be an integer");
            c.registration.max_iter = r.at("max_iter").get<int>();
        }
        if (r.contains("tol")) c.registration.tol = get_number(r.at("tol"), "registration.tol");
        if (r.contains("line_tol"))
            c.registration.line_tol = get_number(r.at("line_tol"), "registration.line_tol");
        if (r.contains("weighted")) {
            if (!r.at("weighted").is_boolean())
                throw ConfigError("registration.weighted must be a boolean");
            c.registration.weighted = r.at("weighted").get<bool>();
        }
    }
    if (j.contains("n_perm")) {
        if (!j.at("n_perm").is_number_integer()) throw ConfigError("n_perm must be an integer");
        c.n_perm = j.at("n_perm").get<int>();
    }
    if (j.contains("band_level")) c.band_level = get_number(j.at("band_level"), "band_level");
    for (const char* key : {"pda_lambda_grid", "pda_tau_grid"}) {
        if (!j.contains(key)) continue;
        const json& g = j.at(key);
        if (!g.is_array()) throw ConfigError(std::string(key) + " must be an array of numbers");
        auto& dst = std::string(key) == "pda_lambda_grid" ? c.pda_lambda_grid : c.pda_tau_grid;
        for (size_t i = 0; i < g.size(); ++i)
            dst.push_back(get_number(g[i], std::string(key) + "[" + std::to_string(i) + "]"));
    }
    if (j.contains("lambda_knot") && !j.at("lambda_knot").is_null())
        c.lambda_knot = get_number(j.at("lambda_knot"), "lambda_knot");
    if (j.contains("seed")) {
        const json& s = j.at("seed");
        if (!s.is_number_integer() || s.get<int64_t>() < 0)
            throw ConfigError("seed must be a non-negative integer");
        c.seed = s.get<uint64_t>();
    }
    if (j.contains("output_dir")) c.output_dir = get_string(j.at("output_dir"), "output_dir");
    if (j.contains("timings")) {
        if (!j.at("timings").is_boolean()) throw ConfigError("timings must be a boolean");
        c.timings = j.at("timings").get<bool>();
    }

    validate_run_config(c);
    return c;
}

namespace {

struct NucleusRec {
    int global_id = -1;
    int input_index = -1;
    int boundary_id = -1;  // id from the boundary file
    int local_index = -1;  // index into the kept per-image boundary list
    std::string group;
};

struct CurveRec {
    ExpressionCurve curve;
    int input_index = -1;
    std::string group;  // input's label (unpaired) or channel role (paired)
};

std::vector<double> pointwise_mean(const std::vector<const ExpressionCurve*>& curves) {
    std::vector<double> m(kGridSize, 0.0);
    for (const auto* c : curves)
        for (int i = 0; i < kGridSize; ++i) m[i] += c->values[i];
    for (double& v : m) v /= static_cast<double>(curves.size());
    return m;
}

std::vector<double> pointwise_se(const std::vector<const ExpressionCurve*>& curves,
                                 const std::vector<double>& mean) {
    const auto n = static_cast<double>(curves.size());
    std::vector<double> se(kGridSize, 0.0);
    for (int i = 0; i < kGridSize; ++i) {
        double ss = 0.0;
        for (const auto* c : curves) {
            const double d = c->values[i] - mean[i];
            ss += d * d;
        }
        se[i] = std::sqrt(ss / (n - 1.0) / n);
    }
    return se;
}

std::string format_p(double p) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", p);
    return buf;
}

}  // namespace

RunManifest run_pipeline(const RunConfig& config) {
    validate_run_config(config);

    RunManifest manifest;
    manifest.version = kVersion;

    const bool paired = config.design == Design::paired;
    std::array<std::string, 2> groups{};  // unpaired: sorted labels; paired: the two roles
    if (paired)
        groups = config.paired_channels;
    else
        groups = group_labels(config);

    // Accumulated state across stages.
    std::vector<LabeledImage> images;
    std::vector<BoundarySet> boundary_sets;
    std::vector<std::vector<BoundaryCurve>> kept_boundaries;  // per input
    std::vector<BDMap> bd_maps;                               // aligned with kept_boundaries
    std::vector<NucleusRec> nuclei;
    std::vector<CurveRec> curves;  // fitted then scaled, in (group block, nucleus) order
    std::vector<RegistrationResult> registrations;
    std::optional<double> group_dilation;
    std::vector<ExpressionCurve> aligned_a, aligned_c;  // after registration
    TestCurve test;
    DiscriminantModel model;
    std::vector<PiecewiseRow> piecewise_rows;
    std::vector<PiecewiseFit> fits_a, fits_c;
    GroupComparison comparison;

    const auto out_path = [&](const std::string& name) {
        return (std::filesystem::path(config.output_dir) / name).string();
    };

    const auto flush_manifest = [&]() {
        json stages = json::array();
        for (const auto& s : manifest.stages) {
            json rec{{"name", s.name}, {"status", s.status}};
            if (s.elapsed_ms) rec["elapsed_ms"] = *s.elapsed_ms;
            if (!s.error.empty()) rec["error"] = s.error;
            stages.push_back(std::move(rec));
        }
        json warn = json::array();
        for (const auto& w : manifest.warnings)
            warn.push_back({{"code", w.code}, {"detail", w.detail}});
        json nuc = json::array();
        for (const auto& n : nuclei)
            nuc.push_back({{"id", n.global_id},
                           {"image", config.inputs[n.input_index].image_path},
                           {"boundary_id", n.boundary_id},
                           {"group", n.group}});
        const json notes = json::array(
            {"Registration weights follow the density model f: w(r) = f(r)^0.75 equals r^0.75 "
             "for r < 1 and 1 for r >= 1.",
             "Group order is deterministic: labels sorted lexicographically (paired: the "
             "configured channel order); the statistic is mean(group_c) - mean(group_a)."});
        json doc{{"version", manifest.version},
                 {"config", config_to_json(config)},
                 {"group_a", groups[0]},
                 {"group_c", groups[1]},
                 {"stages", std::move(stages)},
                 {"warnings", std::move(warn)},
                 {"nuclei", std::move(nuc)},
                 {"interpretation_notes", notes}};
        if (!manifest.failed_stage.empty()) doc["failed_stage"] = manifest.failed_stage;
        std::ofstream out(out_path("manifest.json"), std::ios::binary);
        if (!out) throw DataError("cannot open for writing: " + out_path("manifest.json"));
        out << doc.dump(2) << "\n";
        if (!out.good()) throw DataError("write failed: " + out_path("manifest.json"));
    };

    const auto merge_warnings = [&](const WarningList& list) {
        for (const auto& w : list) add_warning(manifest.warnings, w);
    };

    std::filesystem::create_directories(config.output_dir);

    const auto stage = [&](const char* name, auto&& body) {
        StageRecord rec;
        rec.name = name;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            body();
        } catch (const std::exception& e) {
            rec.status = "failed";
            rec.error = e.what();
            if (config.timings)
                rec.elapsed_ms = std::chrono::duration<double, std::milli>(
                                     std::chrono::steady_clock::now() - t0)
                                     .count();
            manifest.stages.push_back(std::move(rec));
            manifest.failed_stage = name;
            try {
                flush_manifest();
            } catch (...) {
                // The original failure is the one worth reporting.
            }
            throw;
        }
        rec.status = "ok";
        if (config.timings)
            rec.elapsed_ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();
        manifest.stages.push_back(std::move(rec));
    };

    stage("validate", [&] {
        for (const auto& in : config.inputs) {
            WarningList wl;
            images.push_back(read_image(in.image_path, config.channels, &wl));
            for (auto& w : wl) w.detail = in.image_path + ": " + w.detail;
            merge_warnings(wl);
            boundary_sets.push_back(read_boundaries(in.boundary_path));
            if (boundary_sets.back().polygons.empty())
                throw DataError(in.boundary_path + ": no nuclei");
        }
    });

    stage("geometry", [&] {
        for (size_t k = 0; k < config.inputs.size(); ++k) {
            std::vector<BoundaryCurve> smoothed;
            for (const auto& poly : boundary_sets[k].polygons)
                smoothed.push_back(smooth_boundary(poly, SmoothOptions{config.boundary_penalty,
                                                                       /*samples=*/1000}));
            const std::vector<int> keep = exclude_border_nuclei(
                smoothed, images[k].width, images[k].height, config.border_margin);
            std::vector<BoundaryCurve> kept;
            for (int idx : keep) {
                NucleusRec n;
                n.global_id = static_cast<int>(nuclei.size());
                n.input_index = static_cast<int>(k);
                n.boundary_id = boundary_sets[k].ids[idx];
                n.local_index = static_cast<int>(kept.size());
                n.group = config.inputs[k].group;
                nuclei.push_back(std::move(n));
                kept.push_back(std::move(smoothed[idx]));
            }
            if (keep.size() < boundary_sets[k].polygons.size())
                add_warning(manifest.warnings,
                            {"border_excluded",
                             config.inputs[k].image_path + ": " +
                                 std::to_string(boundary_sets[k].polygons.size() - keep.size()) +
                                 " nucleus boundaries within " +
                                 std::to_string(config.border_margin) + " px of the image edge"});
            kept_boundaries.push_back(std::move(kept));
        }
        if (nuclei.empty()) throw DataError("no nuclei remain after border exclusion");
        for (size_t k = 0; k < config.inputs.size(); ++k) {
            if (kept_boundaries[k].empty()) {
                bd_maps.emplace_back();
                continue;
            }
            bd_maps.push_back(
                build_bd_map(kept_boundaries[k], images[k].width, images[k].height));
        }
    });

    stage("curves", [&] {
        std::vector<std::string> roles;
        if (paired)
            roles = {config.paired_channels[0], config.paired_channels[1]};
        else
            roles = {config.analysis_channel};
        for (const auto& role : roles) {
            for (const auto& n : nuclei) {
                ProfileCloud cloud =
                    extract_profile(images[n.input_index], bd_maps[n.input_index], n.local_index,
                                    role);
                ExpressionCurve curve = fit_expression_curve(cloud, config.spline_lambda);
                curve.nucleus_id = n.global_id;
                const std::string where =
                    "nucleus " + std::to_string(n.global_id) + " channel '" + role + "'";
                if (curve.flat_gcv)
                    add_warning(manifest.warnings, {"flat_gcv", where});
                if (curve.low_coverage)
                    add_warning(manifest.warnings, {"low_coverage", where});
                CurveRec rec;
                rec.curve = std::move(curve);
                rec.input_index = n.input_index;
                rec.group = paired ? role : n.group;
                curves.push_back(std::move(rec));
            }
        }
    });

    stage("scaling", [&] {
        for (auto& rec : curves) rec.curve = scale_curve(rec.curve);
    });

    stage("registration", [&] {
        if (paired) {
            // curves holds the first-channel block then the second; same
            // nucleus order within each block.
            const size_t n = nuclei.size();
            std::vector<std::pair<ExpressionCurve, ExpressionCurve>> pairs;
            for (size_t i = 0; i < n; ++i)
                pairs.emplace_back(curves[i].curve, curves[n + i].curve);
            RegistrationResult reg = register_paired(pairs, config.registration);
            merge_warnings(reg.warnings);
            aligned_a.assign(reg.registered.begin(), reg.registered.begin() + n);
            aligned_c.assign(reg.registered.begin() + n, reg.registered.end());
            registrations.push_back(std::move(reg));
        } else {
            std::vector<ExpressionCurve> in_a, in_c;
            for (const auto& rec : curves)
                (rec.group == groups[0] ? in_a : in_c).push_back(rec.curve);
            RegistrationResult reg_a = register_within(in_a, config.registration);
            RegistrationResult reg_c = register_within(in_c, config.registration);
            merge_warnings(reg_a.warnings);
            merge_warnings(reg_c.warnings);
            group_dilation =
                register_between(reg_a.mean_curves[0], reg_c.mean_curves[0], config.registration);
            aligned_a.clear();
            for (const auto& c : reg_a.registered)
                aligned_a.push_back(dilate_curve(c, *group_dilation));
            aligned_c = reg_c.registered;
            registrations.push_back(std::move(reg_a));
            registrations.push_back(std::move(reg_c));
        }
    });

    stage("testing", [&] {
        if (paired) {
            std::vector<std::pair<ExpressionCurve, ExpressionCurve>> pairs;
            for (size_t i = 0; i < aligned_a.size(); ++i)
                pairs.emplace_back(aligned_a[i], aligned_c[i]);
            test = paired_tcurve_and_band(pairs, config.n_perm, config.band_level, config.seed);
        } else {
            test = two_sample_test(aligned_a, aligned_c, config.n_perm, config.band_level,
                                   config.seed);
        }
        merge_warnings(test.warnings);
    });

    stage("discriminant", [&] {
        const auto& lg =
            config.pda_lambda_grid.empty() ? default_lambda_grid() : config.pda_lambda_grid;
        const auto& tg = config.pda_tau_grid.empty() ? default_tau_grid() : config.pda_tau_grid;
        model = loocv_select(curve_matrix(aligned_a), curve_matrix(aligned_c), lg, tg);
    });

    stage("piecewise", [&] {
        const auto fit_block = [&](const std::vector<ExpressionCurve>& block,
                                   const std::string& label, std::vector<PiecewiseFit>& fits) {
            for (const auto& c : block) {
                PiecewiseFit fit = fit_piecewise(c.values, config.lambda_knot);
                if (fit.lambda_fallback)
                    add_warning(manifest.warnings,
                                {"lambda_knot_fallback", "nucleus " +
                                                             std::to_string(c.nucleus_id) +
                                                             " channel '" + c.channel + "'"});
                piecewise_rows.push_back({c.nucleus_id, c.channel, label, fit});
                fits.push_back(std::move(fit));
            }
        };
        fit_block(aligned_a, groups[0], fits_a);
        fit_block(aligned_c, groups[1], fits_c);
        comparison = paired ? compare_groups_paired(fits_a, fits_c)
                            : compare_groups(fits_a, fits_c);
    });

    stage("report", [&] {
        std::vector<ExpressionCurve> all_curves = aligned_a;
        all_curves.insert(all_curves.end(), aligned_c.begin(), aligned_c.end());
        write_curves_csv(out_path("curves.csv"), all_curves);

        if (paired)
            write_registration_groups_json(out_path("registration.json"), {"pairs"},
                                           registrations, std::nullopt);
        else
            write_registration_groups_json(out_path("registration.json"),
                                           {groups[0], groups[1]}, registrations,
                                           group_dilation);
        write_test_json(out_path("test.json"), test);
        write_discriminant_json(out_path("discriminant.json"), model);
        write_piecewise_csv(out_path("piecewise.csv"), piecewise_rows);
        write_comparison_json(out_path("comparison.json"), comparison);

        const auto grid_array = analysis_grid();
        const std::vector<double> grid(grid_array.begin(), grid_array.end());
        std::vector<double> region_edges;
        for (const auto& [lo, hi] : test.significant_regions) {
            region_edges.push_back(lo);
            region_edges.push_back(hi);
        }

        {  // group means with pointwise 2 SE bands
            SvgPlotSpec spec;
            spec.title = "mean expression by group";
            spec.xlabel = "scaled boundary distance r";
            spec.ylabel = "mean g(r)";
            const char* colors[2] = {"#1f77b4", "#d62728"};
            const std::vector<ExpressionCurve>* blocks[2] = {&aligned_a, &aligned_c};
            for (int g = 0; g < 2; ++g) {
                std::vector<const ExpressionCurve*> ptrs;
                for (const auto& c : *blocks[g]) ptrs.push_back(&c);
                const std::vector<double> mean = pointwise_mean(ptrs);
                const std::vector<double> se = pointwise_se(ptrs, mean);
                SvgBand band;
                band.x = grid;
                for (int i = 0; i < kGridSize; ++i) {
                    band.lo.push_back(mean[i] - 2.0 * se[i]);
                    band.hi.push_back(mean[i] + 2.0 * se[i]);
                }
                band.color = colors[g];
                spec.bands.push_back(std::move(band));
                SvgSeries s;
                s.x = grid;
                s.y = mean;
                s.color = colors[g];
                s.label = groups[g];
                spec.series.push_back(std::move(s));
            }
            spec.vlines = region_edges;
            write_svg_plot(out_path("mean_curves.svg"), spec);
        }

        {  // statistic curve against the simultaneous band
            SvgPlotSpec spec;
            spec.title = "pointwise t with simultaneous band";
            spec.xlabel = "scaled boundary distance r";
            spec.ylabel = "t(r)";
            SvgSeries s;
            s.x = grid;
            s.y.assign(test.t.begin(), test.t.end());
            s.label = "t";
            spec.series.push_back(std::move(s));
            spec.hlines = {test.critical, -test.critical};
            spec.vlines = region_edges;
            write_svg_plot(out_path("t_curve.svg"), spec);
        }

        {  // discriminant direction
            SvgPlotSpec spec;
            spec.title = "penalized discriminant direction";
            spec.xlabel = "scaled boundary distance r";
            spec.ylabel = "d(r)";
            SvgSeries s;
            s.x = grid;
            s.y = model.d_p;
            s.color = "#2ca02c";
            spec.series.push_back(std::move(s));
            spec.hlines = {0.0};
            write_svg_plot(out_path("discriminant.svg"), spec);
        }

        {  // score strip with the decision threshold
            SvgPlotSpec spec;
            spec.title = "discriminant scores";
            spec.xlabel = "score d'g";
            spec.ylabel = "group";
            SvgPoints pa;
            pa.x = model.scores_a;
            pa.y.assign(model.scores_a.size(), 1.0);
            pa.color = "#1f77b4";
            pa.label = groups[0];
            SvgPoints pc;
            pc.x = model.scores_c;
            pc.y.assign(model.scores_c.size(), 0.0);
            pc.color = "#d62728";
            pc.label = groups[1];
            spec.points.push_back(std::move(pa));
            spec.points.push_back(std::move(pc));
            spec.vlines = {model.tau};
            write_svg_plot(out_path("scores.svg"), spec);
        }

        {  // per-parameter comparison panels
            struct Param {
                const char* name;
                double (*get)(const PiecewiseFit&);
            };
            const Param params[8] = {
                {"a1", [](const PiecewiseFit& f) { return f.a[0]; }},
                {"a2", [](const PiecewiseFit& f) { return f.a[1]; }},
                {"a3", [](const PiecewiseFit& f) { return f.a[2]; }},
                {"b1", [](const PiecewiseFit& f) { return f.b[0]; }},
                {"b2", [](const PiecewiseFit& f) { return f.b[1]; }},
                {"b3", [](const PiecewiseFit& f) { return f.b[2]; }},
                {"kappa2", [](const PiecewiseFit& f) { return f.kappa2; }},
                {"kappa3", [](const PiecewiseFit& f) { return f.kappa3; }},
            };
            std::vector<SvgPlotSpec> panels;
            for (int p = 0; p < 8; ++p) {
                SvgPlotSpec spec;
                spec.width = 320;
                spec.height = 240;
                const auto& pt = comparison.parameters[p];
                spec.title = pt.degenerate || !pt.p
                                 ? std::string(params[p].name) + " (degenerate)"
                                 : std::string(params[p].name) + "  p=" + format_p(*pt.p);
                spec.xlabel = "group";
                spec.ylabel = params[p].name;
                SvgPoints pa;
                for (const auto& f : fits_a) {
                    pa.x.push_back(1.0);
                    pa.y.push_back(params[p].get(f));
                }
                pa.color = "#1f77b4";
                pa.label = groups[0];
                SvgPoints pc;
                for (const auto& f : fits_c) {
                    pc.x.push_back(2.0);
                    pc.y.push_back(params[p].get(f));
                }
                pc.color = "#d62728";
                pc.label = groups[1];
                spec.points.push_back(std::move(pa));
                spec.points.push_back(std::move(pc));
                panels.push_back(std::move(spec));
            }
            write_svg_panels(out_path("comparison.svg"), panels, 4);
        }
    });

    flush_manifest();
    return manifest;
}

}  // namespace bdp
