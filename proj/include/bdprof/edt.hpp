#pragma once

#include <cstdint>

#include "bdprof/raster.hpp"

namespace bdp {

// Exact squared Euclidean distance transform on the pixel-center grid.
//
// For every pixel p, returns the squared distance (in pixel units) from the
// center of p to the center of the nearest pixel outside `fg` (nonzero = in
// the set).  Pixels outside `fg` get 0.  Arithmetic is integral throughout,
// so results are exact.  If `fg` covers the whole raster there is no outside
// pixel; affected entries then hold a value >= (width + height)^2, which the
// caller must treat as unreachable.
Raster<int64_t> squared_edt(const Mask& fg);

// sqrt of squared_edt, as double.
Raster<double> edt(const Mask& fg);

}  // namespace bdp
