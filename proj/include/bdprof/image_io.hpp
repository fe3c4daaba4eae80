#pragma once

#include <map>
#include <string>

#include "bdprof/common.hpp"
#include "bdprof/image.hpp"

namespace bdp {

// Reads a binary netpbm raster (P5 grayscale, P6 RGB, P7 arbitrary-depth PAM)
// into double planes.  Maxval up to 255 reads as 8-bit, up to 65535 as 16-bit
// big-endian.  Float containers (Pf/PF) and ASCII variants are rejected with
// a DataError naming the limitation.  A header comment of the form
//   # pixel_size_um <value>
// sets the physical pixel size; without it the size defaults to 1.0 and a
// "pixel_size_missing" warning is recorded.  `roles` maps role tags to plane
// indices and is validated against the channel count (ConfigError on a role
// pointing past the last plane).
LabeledImage read_image(const std::string& path, const std::map<std::string, int>& roles,
                        WarningList* warnings = nullptr);

// Writes planes as P5 (one plane), P6 (three planes), or P7 (any other
// count), 8- or 16-bit per image.bit_depth, values rounded and clamped.
// The pixel size is embedded as the comment read_image understands.
void write_image(const std::string& path, const LabeledImage& image);

}  // namespace bdp
