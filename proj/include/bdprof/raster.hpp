#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace bdp {

// Dense row-major 2-d grid.  (x, y) indexing with y as the row.
template <typename T>
struct Raster {
    int width = 0;
    int height = 0;
    std::vector<T> data;

    Raster() = default;
    Raster(int w, int h, T fill = T{}) : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

    T& at(int x, int y) {
        assert(x >= 0 && x < width && y >= 0 && y < height);
        return data[static_cast<size_t>(y) * width + x];
    }
    const T& at(int x, int y) const {
        assert(x >= 0 && x < width && y >= 0 && y < height);
        return data[static_cast<size_t>(y) * width + x];
    }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    size_t size() const { return data.size(); }
};

using Mask = Raster<uint8_t>;  // nonzero = foreground

}  // namespace bdp
