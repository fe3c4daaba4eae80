#include "bdprof/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace bdp {
namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else out.push_back(c);
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void include(double v) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    bool valid() const { return lo <= hi; }
    void pad() {
        if (!valid()) return;
        if (lo == hi) {
            lo -= 1.0;
            hi += 1.0;
        } else {
            const double m = 0.05 * (hi - lo);
            lo -= m;
            hi += m;
        }
    }
};

// Tick positions at a "nice" step (1/2/5 times a power of ten).
std::vector<double> ticks(const Range& r, int target = 6) {
    const double span = r.hi - r.lo;
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) {
            step = m * mag;
            break;
        }
    }
    std::vector<double> out;
    const double first = std::ceil(r.lo / step) * step;
    for (double t = first; t <= r.hi + 1e-9 * span; t += step)
        out.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
    return out;
}

class Panel {
  public:
    Panel(const SvgPlotSpec& spec, double ox, double oy, int w, int h)
        : spec_(spec), ox_(ox), oy_(oy), w_(w), h_(h) {
        for (const auto& b : spec.bands) {
            for (double v : b.x) xr_.include(v);
            for (double v : b.lo) yr_.include(v);
            for (double v : b.hi) yr_.include(v);
        }
        for (const auto& s : spec.series) {
            for (double v : s.x) xr_.include(v);
            for (double v : s.y) yr_.include(v);
        }
        for (const auto& p : spec.points) {
            for (double v : p.x) xr_.include(v);
            for (double v : p.y) yr_.include(v);
        }
        for (double v : spec.hlines) yr_.include(v);
        if (!xr_.valid() || !yr_.valid()) throw ConfigError("svg plot has no data to draw");
        xr_.pad();
        yr_.pad();
    }

    void render(std::ostream& out) const {
        const double left = ox_ + kMarginLeft, top = oy_ + kMarginTop;
        const double pw = w_ - kMarginLeft - kMarginRight, ph = h_ - kMarginTop - kMarginBottom;
        const auto X = [&](double v) { return left + (v - xr_.lo) / (xr_.hi - xr_.lo) * pw; };
        const auto Y = [&](double v) { return top + ph - (v - yr_.lo) / (yr_.hi - yr_.lo) * ph; };

        out << "<g>\n";
        out << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(pw)
            << "\" height=\"" << fmt(ph) << "\" fill=\"white\" stroke=\"#333\"/>\n";
        for (double t : ticks(xr_)) {
            out << "<line x1=\"" << fmt(X(t)) << "\" y1=\"" << fmt(top + ph) << "\" x2=\""
                << fmt(X(t)) << "\" y2=\"" << fmt(top + ph + 4) << "\" stroke=\"#333\"/>\n";
            out << "<text x=\"" << fmt(X(t)) << "\" y=\"" << fmt(top + ph + 16)
                << "\" font-size=\"10\" text-anchor=\"middle\">" << fmt(t) << "</text>\n";
        }
        for (double t : ticks(yr_)) {
            out << "<line x1=\"" << fmt(left - 4) << "\" y1=\"" << fmt(Y(t)) << "\" x2=\""
                << fmt(left) << "\" y2=\"" << fmt(Y(t)) << "\" stroke=\"#333\"/>\n";
            out << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(Y(t) + 3)
                << "\" font-size=\"10\" text-anchor=\"end\">" << fmt(t) << "</text>\n";
        }
        for (const auto& b : spec_.bands) {
            if (b.x.empty()) continue;
            out << "<path d=\"M";
            for (size_t i = 0; i < b.x.size(); ++i)
                out << fmt(X(b.x[i])) << "," << fmt(Y(b.hi[i])) << (i + 1 < b.x.size() ? " L" : " ");
            for (size_t i = b.x.size(); i-- > 0;)
                out << "L" << fmt(X(b.x[i])) << "," << fmt(Y(b.lo[i])) << " ";
            out << "Z\" fill=\"" << b.color << "\" fill-opacity=\"" << fmt(b.opacity)
                << "\" stroke=\"none\"/>\n";
        }
        for (double v : spec_.vlines)
            out << "<line x1=\"" << fmt(X(v)) << "\" y1=\"" << fmt(top) << "\" x2=\"" << fmt(X(v))
                << "\" y2=\"" << fmt(top + ph)
                << "\" stroke=\"#888\" stroke-dasharray=\"4 3\"/>\n";
        for (double v : spec_.hlines)
            out << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(Y(v)) << "\" x2=\""
                << fmt(left + pw) << "\" y2=\"" << fmt(Y(v))
                << "\" stroke=\"#888\" stroke-dasharray=\"4 3\"/>\n";
        for (const auto& s : spec_.series) {
            if (s.x.empty()) continue;
            out << "<path d=\"M";
            for (size_t i = 0; i < s.x.size(); ++i)
                out << fmt(X(s.x[i])) << "," << fmt(Y(s.y[i])) << (i + 1 < s.x.size() ? " L" : "");
            out << "\" fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"" << fmt(s.width)
                << "\"";
            if (s.dashed) out << " stroke-dasharray=\"6 4\"";
            out << "/>\n";
        }
        for (const auto& p : spec_.points)
            for (size_t i = 0; i < p.x.size(); ++i)
                out << "<circle cx=\"" << fmt(X(p.x[i])) << "\" cy=\"" << fmt(Y(p.y[i]))
                    << "\" r=\"" << fmt(p.radius) << "\" fill=\"" << p.color
                    << "\" fill-opacity=\"0.8\"/>\n";

        if (!spec_.title.empty())
            out << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"" << fmt(top - 8)
                << "\" font-size=\"13\" text-anchor=\"middle\" font-weight=\"bold\">"
                << escape(spec_.title) << "</text>\n";
        if (!spec_.xlabel.empty())
            out << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"" << fmt(top + ph + 32)
                << "\" font-size=\"11\" text-anchor=\"middle\">" << escape(spec_.xlabel)
                << "</text>\n";
        if (!spec_.ylabel.empty())
            out << "<text x=\"" << fmt(ox_ + 14) << "\" y=\"" << fmt(top + ph / 2)
                << "\" font-size=\"11\" text-anchor=\"middle\" transform=\"rotate(-90 "
                << fmt(ox_ + 14) << " " << fmt(top + ph / 2) << ")\">" << escape(spec_.ylabel)
                << "</text>\n";

        // Legend: one row per labeled series/point set, top-right corner.
        double ly = top + 14;
        for (const auto& s : spec_.series) {
            if (s.label.empty()) continue;
            out << "<line x1=\"" << fmt(left + pw - 110) << "\" y1=\"" << fmt(ly - 4) << "\" x2=\""
                << fmt(left + pw - 90) << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << s.color
                << "\" stroke-width=\"2\"" << (s.dashed ? " stroke-dasharray=\"6 4\"" : "")
                << "/>\n<text x=\"" << fmt(left + pw - 84) << "\" y=\"" << fmt(ly)
                << "\" font-size=\"10\">" << escape(s.label) << "</text>\n";
            ly += 14;
        }
        for (const auto& p : spec_.points) {
            if (p.label.empty()) continue;
            out << "<circle cx=\"" << fmt(left + pw - 100) << "\" cy=\"" << fmt(ly - 4)
                << "\" r=\"3\" fill=\"" << p.color << "\"/>\n<text x=\"" << fmt(left + pw - 84)
                << "\" y=\"" << fmt(ly) << "\" font-size=\"10\">" << escape(p.label)
                << "</text>\n";
            ly += 14;
        }
        out << "</g>\n";
    }

  private:
    static constexpr double kMarginLeft = 52, kMarginRight = 16;
    static constexpr double kMarginTop = 28, kMarginBottom = 40;
    const SvgPlotSpec& spec_;
    double ox_, oy_;
    int w_, h_;
    Range xr_, yr_;
};

void write_document(const std::string& path, int width, int height,
                    const std::vector<std::pair<const SvgPlotSpec*, std::pair<double, double>>>& cells,
                    int cell_w, int cell_h) {
    std::ostringstream body;
    for (const auto& [spec, origin] : cells)
        Panel(*spec, origin.first, origin.second, cell_w, cell_h).render(body);
    std::ofstream out(path);
    if (!out) throw DataError(path + ": cannot open for writing");
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<g font-family=\"Helvetica, Arial, sans-serif\" fill=\"#111\">\n"
        << body.str() << "</g>\n</svg>\n";
    if (!out) throw DataError(path + ": write failed");
}

}  // namespace

void write_svg_plot(const std::string& path, const SvgPlotSpec& spec) {
    write_document(path, spec.width, spec.height, {{&spec, {0.0, 0.0}}}, spec.width, spec.height);
}

void write_svg_panels(const std::string& path, const std::vector<SvgPlotSpec>& panels,
                      int columns) {
    if (panels.empty()) throw ConfigError("svg panel grid is empty");
    columns = std::max(1, columns);
    const int rows = (static_cast<int>(panels.size()) + columns - 1) / columns;
    const int cw = panels.front().width, ch = panels.front().height;
    std::vector<std::pair<const SvgPlotSpec*, std::pair<double, double>>> cells;
    for (size_t i = 0; i < panels.size(); ++i) {
        const int r = static_cast<int>(i) / columns, c = static_cast<int>(i) % columns;
        cells.push_back({&panels[i], {c * cw, r * ch}});
    }
    write_document(path, columns * cw, rows * ch, cells, cw, ch);
}

}  // namespace bdp
