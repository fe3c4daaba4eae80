#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bdp {

// Bad configuration or bad arguments supplied by the caller.  CLI exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (images, boundaries, CSV).  CLI exit code 2.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical failure (divergence, singular system).  CLI exit code 3.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Analysis grid: r_i = 0.01 * i for i = 1..200, covering (0, 2].
inline constexpr int kGridSize = 200;
inline constexpr double kGridStep = 0.01;

inline double grid_r(int i) { return kGridStep * (i + 1); }  // i is 0-based

inline std::array<double, kGridSize> analysis_grid() {
    std::array<double, kGridSize> g{};
    for (int i = 0; i < kGridSize; ++i) g[i] = grid_r(i);
    return g;
}

// Riemann sum used everywhere an integral over (0,2] appears: step * sum of
// grid values.  Keeping one definition makes the area-scaling idempotence exact.
inline double riemann_sum(const std::vector<double>& values) {
    double s = 0.0;
    for (double v : values) s += v;
    return kGridStep * s;
}

struct Warning {
    std::string code;    // stable identifier, e.g. "low_coverage"
    std::string detail;  // human-readable context
    bool operator==(const Warning&) const = default;
};

using WarningList = std::vector<Warning>;

// Appends w to list unless an identical (code, detail) pair is already present.
inline void add_warning(WarningList& list, Warning w) {
    for (const auto& e : list)
        if (e == w) return;
    list.push_back(std::move(w));
}

}  // namespace bdp
