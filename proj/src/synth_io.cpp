#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "bdprof/boundary_io.hpp"
#include "bdprof/image_io.hpp"
#include "bdprof/synth.hpp"

namespace bdp {

using nlohmann::json;

namespace {

json load_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open scene spec: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw DataError(path + ": " + e.what());
    }
}

void require_object(const json& j, const std::string& what) {
    if (!j.is_object()) throw ConfigError(what + " must be a JSON object");
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

double get_number_or(const json& parent, const char* key, double fallback,
                     const std::string& what) {
    if (!parent.contains(key)) return fallback;
    return get_number(parent.at(key), what + "." + key);
}

int get_int(const json& j, const std::string& what) {
    if (!j.is_number_integer()) throw ConfigError(what + " must be an integer");
    return j.get<int>();
}

TemplateKind parse_kind(const std::string& s, const std::string& what) {
    if (s == "constant") return TemplateKind::constant;
    if (s == "step") return TemplateKind::step;
    if (s == "ramp") return TemplateKind::ramp;
    if (s == "boundary_peak") return TemplateKind::boundary_peak;
    throw ConfigError(what + ": unknown template kind '" + s + "'");
}

}  // namespace

SynthSpec parse_synth_spec(const std::string& path) {
    const json j = load_json(path);
    require_object(j, "scene spec");
    reject_unknown(j, "scene spec",
                   {"width", "height", "nuclei", "channels", "illumination", "noise_sigma",
                    "boundary_jitter", "boundary_vertices", "seed"});

    SynthSpec spec;
    if (j.contains("width")) spec.width = get_int(j.at("width"), "width");
    if (j.contains("height")) spec.height = get_int(j.at("height"), "height");
    if (j.contains("seed")) {
        const json& s = j.at("seed");
        if (!s.is_number_integer() || s.get<int64_t>() < 0)
            throw ConfigError("seed must be a non-negative integer");
        spec.seed = s.get<uint64_t>();
    }

    if (!j.contains("nuclei") || !j.at("nuclei").is_array())
        throw ConfigError("scene spec needs a 'nuclei' array");
    for (size_t k = 0; k < j.at("nuclei").size(); ++k) {
        const json& n = j.at("nuclei")[k];
        const std::string what = "nuclei[" + std::to_string(k) + "]";
        require_object(n, what);
        reject_unknown(n, what, {"cx", "cy", "a", "b", "theta"});
        EllipseSpec e;
        for (const char* key : {"cx", "cy", "a", "b"})
            if (!n.contains(key)) throw ConfigError(what + " needs '" + key + "'");
        e.cx = get_number(n.at("cx"), what + ".cx");
        e.cy = get_number(n.at("cy"), what + ".cy");
        e.a = get_number(n.at("a"), what + ".a");
        e.b = get_number(n.at("b"), what + ".b");
        e.theta = get_number_or(n, "theta", 0.0, what);
        spec.nuclei.push_back(e);
    }

    if (!j.contains("channels") || !j.at("channels").is_object())
        throw ConfigError("scene spec needs a 'channels' object");
    for (const auto& [role, t] : j.at("channels").items()) {
        const std::string what = "channels." + role;
        require_object(t, what);
        reject_unknown(t, what, {"kind", "level", "level_out", "edge", "width"});
        if (!t.contains("kind") || !t.at("kind").is_string())
            throw ConfigError(what + " needs a 'kind' string");
        ProfileTemplate p;
        p.kind = parse_kind(t.at("kind").get<std::string>(), what);
        p.level = get_number_or(t, "level", p.level, what);
        p.level_out = get_number_or(t, "level_out", p.level_out, what);
        p.edge = get_number_or(t, "edge", p.edge, what);
        p.width = get_number_or(t, "width", p.width, what);
        spec.channels[role] = p;
    }

    if (j.contains("illumination")) {
        const json& c = j.at("illumination");
        if (!c.is_array() || c.size() != 6)
            throw ConfigError("illumination must be an array of 6 coefficients");
        for (size_t i = 0; i < 6; ++i)
            spec.illumination[i] = get_number(c[i], "illumination[" + std::to_string(i) + "]");
    }
    spec.noise_sigma = get_number_or(j, "noise_sigma", 0.0, "scene spec");
    spec.boundary_jitter = get_number_or(j, "boundary_jitter", 0.0, "scene spec");
    if (j.contains("boundary_vertices"))
        spec.boundary_vertices = get_int(j.at("boundary_vertices"), "boundary_vertices");
    return spec;
}

void write_synth_outputs(const std::string& dir, const SynthSpec& spec,
                         const SynthResult& result) {
    std::filesystem::create_directories(dir);
    const auto join = [&](const std::string& name) {
        return (std::filesystem::path(dir) / name).string();
    };

    const size_t depth = result.image.planes.size();
    const char* ext = depth == 1 ? "image.pgm" : depth == 3 ? "image.ppm" : "image.pam";
    write_image(join(ext), result.image);

    const auto as_set = [](const std::vector<std::vector<Point>>& polys) {
        BoundarySet set;
        set.polygons = polys;
        for (size_t i = 0; i < polys.size(); ++i) set.ids.push_back(static_cast<int>(i));
        return set;
    };
    write_boundaries(join("boundaries_true.json"), as_set(result.true_boundaries));
    if (spec.boundary_jitter > 0.0)
        write_boundaries(join("boundaries_jittered.json"), as_set(result.jittered_boundaries));

    json channels = json::object();
    for (const auto& [role, curve] : result.truth_curves)
        channels[role] = std::vector<double>(curve.begin(), curve.end());
    json truth{{"grid", analysis_grid()}, {"channels", std::move(channels)}};
    std::ofstream out(join("truth.json"), std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + join("truth.json"));
    out << truth.dump(2) << "\n";
    if (!out.good()) throw DataError("write failed: " + join("truth.json"));
}

}  // namespace bdp
