#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bdprof/raster.hpp"

namespace bdp {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

// Closed nucleus boundary: the hand-marked polygon and its smoothed resampling.
struct BoundaryCurve {
    std::vector<Point> vertices;  // cleaned input polygon (no repeated closing point)
    std::vector<Point> smoothed;  // resampled points on the fitted closed curve
    double smoothing_penalty = 0.0;
};

struct SmoothOptions {
    // Penalty for the periodic smoothers (both coordinates share one value).
    // Unset selects it by minimizing the summed per-coordinate GCV, with the
    // search restricted to penalties keeping the per-coordinate equivalent
    // degrees of freedom at or below 0.75 * vertex count.  Plain GCV is
    // unreliable for hand-marked polygons with very few vertices (it drifts to
    // interpolation); the cap keeps the default usable down to small n.
    std::optional<double> penalty;
    int samples = 1000;
};

// Fits one closed curve through the polygon vertices: cumulative chord-length
// parameter normalized to [0, 2pi), two periodic smoothing splines for x and y,
// resampled at `samples` equally spaced parameter values.
// Rejects polygons with fewer than 3 distinct vertices, with self-intersections
// or with zero enclosed area (DataError).
BoundaryCurve smooth_boundary(const std::vector<Point>& vertices, const SmoothOptions& options = {});

// Scaled boundary-distance map.  bd holds the value of the orbit owner:
// 0 at the deepest interior point, 1 on the boundary, above 1 outside, growing
// by 1 per d_max of Euclidean distance.  orbit holds the owning nucleus index
// (the nucleus minimizing bd at that pixel; ties go to the lowest index).
struct BDMap {
    Raster<double> bd;
    Raster<int32_t> orbit;
    std::vector<double> d_max;  // interior EDT supremum per nucleus, in pixels
};

// Rasterizes every smoothed boundary (even-odd scanline fill over pixel
// centers) and assembles the map from per-nucleus interior/exterior exact
// distance transforms.  Errors: a nucleus with empty rasterized interior, or
// two nuclei with overlapping interiors (DataError).
BDMap build_bd_map(const std::vector<BoundaryCurve>& nuclei, int width, int height);

// Indices of nuclei whose smoothed boundary stays at least `margin` pixels
// away from the image edge (pixel-center coordinates 0..width-1, 0..height-1).
// Border-clipped nuclei are excluded from analysis.
std::vector<int> exclude_border_nuclei(const std::vector<BoundaryCurve>& nuclei, int width, int height,
                                       double margin);

// Even-odd scanline rasterization of a closed polyline onto pixel centers.
Mask rasterize_polygon(const std::vector<Point>& points, int width, int height);

// Shoelace area (absolute value) of a closed polyline.
double polygon_area(const std::vector<Point>& points);

// Bilinear interpolation of a raster at a continuous position (clamped).
double sample_bilinear(const Raster<double>& raster, double x, double y);

}  // namespace bdp
