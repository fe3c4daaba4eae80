#include "bdprof/boundary_io.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

namespace bdp {
namespace {

using nlohmann::json;

std::vector<Point> parse_vertices(const json& arr, const std::string& path, size_t index) {
    const std::string where = path + ": nucleus " + std::to_string(index);
    if (!arr.is_array() || arr.size() < 3)
        throw DataError(where + ": needs an array of at least 3 vertices");
    std::vector<Point> out;
    out.reserve(arr.size());
    for (const auto& v : arr) {
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
            throw DataError(where + ": vertices must be [x, y] number pairs");
        const double x = v[0].get<double>(), y = v[1].get<double>();
        if (!std::isfinite(x) || !std::isfinite(y))
            throw DataError(where + ": vertex coordinates must be finite");
        out.push_back({x, y});
    }
    return out;
}

}  // namespace

BoundarySet read_boundaries(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path + ": cannot open boundary file");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw DataError(path + ": invalid JSON: " + e.what());
    }
    if (!doc.is_object() || !doc.contains("nuclei") || !doc["nuclei"].is_array())
        throw DataError(path + ": expected an object with a \"nuclei\" array");

    BoundarySet set;
    std::set<int> seen;
    const auto& nuclei = doc["nuclei"];
    for (size_t i = 0; i < nuclei.size(); ++i) {
        const auto& entry = nuclei[i];
        int id = static_cast<int>(i);
        const json* vertices = &entry;
        if (entry.is_object()) {
            if (!entry.contains("vertices"))
                throw DataError(path + ": nucleus " + std::to_string(i) + ": missing \"vertices\"");
            if (entry.contains("id")) {
                if (!entry["id"].is_number_integer() || entry["id"].get<int>() < 0)
                    throw DataError(path + ": nucleus " + std::to_string(i) +
                                    ": id must be a non-negative integer");
                id = entry["id"].get<int>();
            }
            vertices = &entry["vertices"];
        }
        if (!seen.insert(id).second)
            throw DataError(path + ": nucleus " + std::to_string(i) + ": duplicate id " +
                            std::to_string(id));
        set.polygons.push_back(parse_vertices(*vertices, path, i));
        set.ids.push_back(id);
    }
    return set;
}

void write_boundaries(const std::string& path, const BoundarySet& set) {
    if (set.polygons.size() != set.ids.size())
        throw ConfigError("write_boundaries: polygons and ids must be parallel");
    json nuclei = json::array();
    for (size_t i = 0; i < set.polygons.size(); ++i) {
        json vertices = json::array();
        for (const auto& p : set.polygons[i]) vertices.push_back({p.x, p.y});
        nuclei.push_back({{"id", set.ids[i]}, {"vertices", std::move(vertices)}});
    }
    std::ofstream out(path);
    if (!out) throw DataError(path + ": cannot open for writing");
    out << json{{"nuclei", std::move(nuclei)}}.dump(2) << "\n";
    if (!out) throw DataError(path + ": write failed");
}

}  // namespace bdp
