#include "bdprof/reports.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace bdp {
namespace {

using nlohmann::json;

std::ofstream open_out(const std::string& path, bool binary = false) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw DataError(path + ": cannot open for writing");
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw DataError(path + ": write failed");
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void dump_json(const std::string& path, const json& doc) {
    auto out = open_out(path);
    out << doc.dump(2) << "\n";
    finish(out, path);
}

json warnings_json(const WarningList& warnings) {
    json arr = json::array();
    for (const auto& w : warnings) arr.push_back({{"code", w.code}, {"detail", w.detail}});
    return arr;
}

}  // namespace

void write_curves_csv(const std::string& path, const std::vector<ExpressionCurve>& curves) {
    auto out = open_out(path);
    out << "nucleus_id,channel,r,g\n";
    for (const auto& c : curves)
        for (int i = 0; i < kGridSize; ++i)
            out << c.nucleus_id << "," << c.channel << "," << num(grid_r(i)) << ","
                << num(c.values[i]) << "\n";
    finish(out, path);
}

std::vector<ExpressionCurve> read_curves_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open curves CSV: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "nucleus_id,channel,r,g")
        throw DataError(path + ": expected header nucleus_id,channel,r,g");

    std::vector<ExpressionCurve> curves;
    int row_in_curve = 0;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto where = [&] { return path + ":" + std::to_string(line_no) + ": "; };
        std::array<std::string, 4> field;
        size_t pos = 0;
        for (int f = 0; f < 4; ++f) {
            const size_t comma = line.find(',', pos);
            const bool last = f == 3;
            if (last != (comma == std::string::npos))
                throw DataError(where() + "expected 4 comma-separated fields");
            field[f] = line.substr(pos, last ? std::string::npos : comma - pos);
            pos = comma + 1;
        }
        int nucleus_id = 0;
        double r = 0.0, g = 0.0;
        try {
            size_t used = 0;
            nucleus_id = std::stoi(field[0], &used);
            if (used != field[0].size()) throw std::invalid_argument("trailing");
            r = std::stod(field[2], &used);
            if (used != field[2].size()) throw std::invalid_argument("trailing");
            g = std::stod(field[3], &used);
            if (used != field[3].size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw DataError(where() + "malformed numeric field");
        }
        if (!std::isfinite(g)) throw DataError(where() + "non-finite curve value");

        const bool starts_curve = row_in_curve == 0 || curves.empty() ||
                                  nucleus_id != curves.back().nucleus_id ||
                                  field[1] != curves.back().channel;
        if (starts_curve) {
            if (row_in_curve != 0)
                throw DataError(where() + "curve for nucleus " +
                                std::to_string(curves.back().nucleus_id) + " channel '" +
                                curves.back().channel + "' has fewer rows than the grid");
            curves.emplace_back();
            curves.back().nucleus_id = nucleus_id;
            curves.back().channel = field[1];
        }
        if (std::abs(r - grid_r(row_in_curve)) > 1e-9)
            throw DataError(where() + "r value off the analysis grid");
        curves.back().values[row_in_curve] = g;
        row_in_curve = (row_in_curve + 1) % kGridSize;
    }
    if (row_in_curve != 0)
        throw DataError(path + ": last curve has fewer rows than the grid");
    return curves;
}

void write_cloud_csv(const std::string& path, const std::vector<ProfileCloud>& clouds) {
    auto out = open_out(path);
    out << "nucleus_id,channel,r,a\n";
    for (const auto& c : clouds)
        for (size_t i = 0; i < c.r.size(); ++i)
            out << c.nucleus_id << "," << c.channel << "," << num(c.r[i]) << "," << num(c.a[i])
                << "\n";
    finish(out, path);
}

namespace {

json registration_to_json(const RegistrationResult& result) {
    json curves = json::array();
    for (const auto& c : result.registered)
        curves.push_back({{"nucleus_id", c.nucleus_id},
                          {"channel", c.channel},
                          {"scale", c.scale},
                          {"dilation", c.dilation},
                          {"lambda", c.lambda},
                          {"edf", c.edf},
                          {"flat_gcv", c.flat_gcv},
                          {"low_coverage", c.low_coverage},
                          {"extrapolated_low", c.extrapolated_low},
                          {"extrapolated_high", c.extrapolated_high}});
    json doc{{"dilations", result.dilations},
             {"sse_trace", result.sse_trace},
             {"mean_curves", result.mean_curves},
             {"curves", std::move(curves)},
             {"warnings", warnings_json(result.warnings)}};
    if (result.group_dilation) doc["group_dilation"] = *result.group_dilation;
    return doc;
}

}  // namespace

void write_registration_json(const std::string& path, const RegistrationResult& result) {
    dump_json(path, registration_to_json(result));
}

void write_registration_groups_json(const std::string& path,
                                    const std::vector<std::string>& names,
                                    const std::vector<RegistrationResult>& results,
                                    std::optional<double> group_dilation) {
    if (names.size() != results.size())
        throw ConfigError("registration groups: names and results differ in length");
    json groups = json::object();
    for (size_t i = 0; i < names.size(); ++i) {
        if (groups.contains(names[i]))
            throw ConfigError("registration groups: duplicate name '" + names[i] + "'");
        groups[names[i]] = registration_to_json(results[i]);
    }
    json doc{{"groups", std::move(groups)}};
    if (group_dilation) doc["group_dilation"] = *group_dilation;
    dump_json(path, doc);
}

void write_test_json(const std::string& path, const TestCurve& test) {
    json regions = json::array();
    for (const auto& [lo, hi] : test.significant_regions) regions.push_back({lo, hi});
    json doc{{"design", test.design == Design::paired ? "paired" : "unpaired"},
             {"t", std::vector<double>(test.t.begin(), test.t.end())},
             {"critical", test.critical},
             {"level", test.level},
             {"n_perm", test.n_perm},
             {"seed", test.seed},
             {"exact", test.exact},
             {"significant_regions", std::move(regions)},
             {"degenerate_indices", test.degenerate},
             {"warnings", warnings_json(test.warnings)}};
    dump_json(path, doc);
}

void write_discriminant_json(const std::string& path, const DiscriminantModel& model) {
    json doc{{"d", model.d_p},
             {"lambda_ridge", model.lambda_ridge},
             {"tau", model.tau},
             {"cv_errors", model.cv_errors},
             {"cv_error_rate", model.cv_error_rate},
             {"scores_a", model.scores_a},
             {"scores_c", model.scores_c},
             {"lambda_grid", model.lambda_grid},
             {"tau_grid", model.tau_grid},
             {"cv_surface", model.cv_surface}};
    dump_json(path, doc);
}

void write_piecewise_csv(const std::string& path, const std::vector<PiecewiseRow>& rows) {
    auto out = open_out(path);
    out << "nucleus_id,channel,group,kappa2,kappa3,a1,a2,a3,b1,b2,b3,wsse,r_squared,"
           "lambda_knot,lambda_fallback\n";
    for (const auto& r : rows) {
        const auto& f = r.fit;
        out << r.nucleus_id << "," << r.channel << "," << r.group << "," << num(f.kappa2) << ","
            << num(f.kappa3);
        for (int s = 0; s < 3; ++s) out << "," << num(f.a[s]);
        for (int s = 0; s < 3; ++s) out << "," << num(f.b[s]);
        out << "," << num(f.wsse) << "," << num(f.r_squared) << "," << num(f.lambda_knot) << ","
            << (f.lambda_fallback ? 1 : 0) << "\n";
    }
    finish(out, path);
}

void write_comparison_json(const std::string& path, const GroupComparison& comparison) {
    json params = json::array();
    for (const auto& p : comparison.parameters) {
        json entry{{"name", p.name},          {"mean_a", p.mean_a},
                   {"mean_c", p.mean_c},      {"median_a", p.median_a},
                   {"median_c", p.median_c},  {"degenerate", p.degenerate}};
        if (p.p) {
            entry["t"] = p.t;
            entry["df"] = p.df;
            entry["p"] = *p.p;
        }
        params.push_back(std::move(entry));
    }
    dump_json(path, {{"paired", comparison.paired}, {"parameters", std::move(params)}});
}

void write_bd_map(const std::string& base_path, const BDMap& map) {
    {
        auto out = open_out(base_path + ".f32", true);
        for (int y = 0; y < map.bd.height; ++y)
            for (int x = 0; x < map.bd.width; ++x) {
                const float v = static_cast<float>(map.bd.at(x, y));
                out.write(reinterpret_cast<const char*>(&v), sizeof v);
            }
        finish(out, base_path + ".f32");
    }
    {
        auto out = open_out(base_path + ".orbit.i32", true);
        for (int y = 0; y < map.orbit.height; ++y)
            for (int x = 0; x < map.orbit.width; ++x) {
                const int32_t v = map.orbit.at(x, y);
                out.write(reinterpret_cast<const char*>(&v), sizeof v);
            }
        finish(out, base_path + ".orbit.i32");
    }
    dump_json(base_path + ".json", {{"width", map.bd.width},
                                    {"height", map.bd.height},
                                    {"bd_file", base_path + ".f32"},
                                    {"bd_dtype", "float32-le"},
                                    {"orbit_file", base_path + ".orbit.i32"},
                                    {"orbit_dtype", "int32-le"},
                                    {"d_max", map.d_max},
                                    {"row_major", true}});
}

}  // namespace bdp
