#pragma once

#include <map>
#include <string>
#include <vector>

#include "bdprof/raster.hpp"

namespace bdp {

// Multi-channel intensity image with role labels.  Intensities are kept raw
// (no background subtraction or normalization); 8- and 16-bit reads both land
// in double planes.
struct LabeledImage {
    int width = 0;
    int height = 0;
    std::vector<Raster<double>> planes;
    std::map<std::string, int> roles;  // role tag ("body", "membrane", "marker") -> plane
    double pixel_size_um = 1.0;
    bool pixel_size_from_file = false;
    int bit_depth = 8;

    const Raster<double>& plane_for(const std::string& role) const;
};

}  // namespace bdp
