#include "bdprof/edt.hpp"

#include <cmath>
#include <vector>

namespace bdp {
namespace {

int64_t sq(int64_t v) { return v * v; }

// floor division for b > 0; the separator numerator can be negative.
int64_t floor_div(int64_t a, int64_t b) {
    int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

// Two-pass algorithm (Meijster et al.): column scans produce per-pixel vertical
// distances, then each row computes the lower envelope of the parabolas
// f(x, i) = (x - i)^2 + G(i)^2 with integer arithmetic only.
Raster<int64_t> squared_edt(const Mask& fg) {
    const int w = fg.width, h = fg.height;
    Raster<int64_t> out(w, h, 0);
    if (w == 0 || h == 0) return out;

    const int64_t inf = w + h;  // larger than any achievable axis distance

    // Phase 1: G(x,y) = vertical distance to the nearest non-foreground pixel
    // in the same column (inf when the column is all foreground).
    Raster<int64_t> G(w, h, 0);
    for (int x = 0; x < w; ++x) {
        G.at(x, 0) = fg.at(x, 0) ? inf : 0;
        for (int y = 1; y < h; ++y)
            G.at(x, y) = fg.at(x, y) ? (G.at(x, y - 1) < inf ? G.at(x, y - 1) + 1 : inf) : 0;
        for (int y = h - 2; y >= 0; --y)
            if (G.at(x, y + 1) + 1 < G.at(x, y)) G.at(x, y) = G.at(x, y + 1) + 1;
    }

    // Phase 2: per-row lower envelope.
    std::vector<int> s(w), t(w);
    std::vector<int64_t> g2(w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) g2[x] = sq(G.at(x, y));
        auto f = [&](int64_t x, int64_t i) { return sq(x - i) + g2[i]; };
        auto sep = [&](int64_t i, int64_t u) {
            return floor_div(sq(u) - sq(i) + g2[u] - g2[i], 2 * (u - i));
        };
        int q = 0;
        s[0] = 0;
        t[0] = 0;
        for (int u = 1; u < w; ++u) {
            while (q >= 0 && f(t[q], s[q]) > f(t[q], u)) --q;
            if (q < 0) {
                q = 0;
                s[0] = u;
            } else {
                int64_t wx = 1 + sep(s[q], u);
                if (wx < w) {
                    ++q;
                    s[q] = u;
                    t[q] = static_cast<int>(wx);
                }
            }
        }
        for (int u = w - 1; u >= 0; --u) {
            out.at(u, y) = f(u, s[q]);
            if (u == t[q]) --q;
        }
    }
    return out;
}

Raster<double> edt(const Mask& fg) {
    Raster<int64_t> sq_map = squared_edt(fg);
    Raster<double> out(fg.width, fg.height, 0.0);
    for (size_t i = 0; i < sq_map.data.size(); ++i) out.data[i] = std::sqrt(static_cast<double>(sq_map.data[i]));
    return out;
}

}  // namespace bdp
