#pragma once

#include <string>
#include <vector>

#include "bdprof/common.hpp"
#include "bdprof/geometry.hpp"

namespace bdp {

// Hand-marked nucleus outlines as read from / written to disk.
struct BoundarySet {
    std::vector<std::vector<Point>> polygons;
    std::vector<int> ids;  // parallel to polygons
};

// JSON contract: {"nuclei": [...]} where each entry is either a bare vertex
// array [[x, y], ...] (ids assigned 0, 1, ...) or {"id": n, "vertices":
// [[x, y], ...]}.  Structural problems raise DataError naming the file and
// the offending nucleus index; ids must be unique and non-negative; each
// polygon needs at least 3 vertices.
BoundarySet read_boundaries(const std::string& path);

// Writes the object form with explicit ids.
void write_boundaries(const std::string& path, const BoundarySet& set);

}  // namespace bdp
