#pragma once

#include <string>
#include <vector>

#include "bdprof/common.hpp"

namespace bdp {

// Minimal static SVG line/point chart.  Output is fully deterministic: no
// timestamps, no randomness, fixed number formatting.

struct SvgSeries {
    std::vector<double> x, y;
    std::string color = "#1f77b4";
    double width = 1.5;
    bool dashed = false;
    std::string label;  // legend entry when non-empty
};

struct SvgBand {  // shaded region between lo and hi, drawn under the series
    std::vector<double> x, lo, hi;
    std::string color = "#1f77b4";
    double opacity = 0.2;
};

struct SvgPoints {
    std::vector<double> x, y;
    std::string color = "#d62728";
    double radius = 2.5;
    std::string label;
};

struct SvgPlotSpec {
    std::string title, xlabel, ylabel;
    std::vector<SvgBand> bands;
    std::vector<SvgSeries> series;
    std::vector<SvgPoints> points;
    std::vector<double> vlines;  // dashed gray vertical guides (data coords)
    std::vector<double> hlines;
    int width = 720, height = 460;
};

// Renders one chart.  Throws ConfigError when nothing would be drawn and
// DataError when the file cannot be written.
void write_svg_plot(const std::string& path, const SvgPlotSpec& spec);

// Renders a grid of small charts into one file, `columns` per row.
void write_svg_panels(const std::string& path, const std::vector<SvgPlotSpec>& panels,
                      int columns);

}  // namespace bdp
