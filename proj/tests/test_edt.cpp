#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "bdprof/edt.hpp"
#include "oracles.hpp"

using bdp::Mask;

namespace {

Mask random_mask(int w, int h, double fg_prob, uint64_t seed) {
    Mask m(w, h);
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution d(fg_prob);
    for (auto& v : m.data) v = d(rng) ? 1 : 0;
    return m;
}

Mask disk_mask(int w, int h, double cx, double cy, double radius) {
    Mask m(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double dx = x - cx, dy = y - cy;
            m.at(x, y) = (dx * dx + dy * dy <= radius * radius) ? 1 : 0;
        }
    return m;
}

}  // namespace

TEST_CASE("single interior pixel distances") {
    // 5x5, single background pixel at the center: squared EDT of the
    // complement gives squared distances to (2,2).
    Mask fg(5, 5, 1);
    fg.at(2, 2) = 0;
    auto sq = bdp::squared_edt(fg);
    CHECK(sq.at(2, 2) == 0);
    CHECK(sq.at(3, 2) == 1);
    CHECK(sq.at(3, 3) == 2);
    CHECK(sq.at(0, 0) == 8);
    CHECK(sq.at(4, 2) == 4);
    CHECK(sq.at(0, 2) == 4);
}

TEST_CASE("background pixels are zero") {
    auto m = random_mask(17, 9, 0.5, 7);
    auto sq = bdp::squared_edt(m);
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x)
            if (!m.at(x, y)) CHECK(sq.at(x, y) == 0);
}

TEST_CASE("matches brute force on random masks") {
    std::mt19937_64 seeds(42);
    for (int rep = 0; rep < 40; ++rep) {
        int w = 1 + static_cast<int>(seeds() % 40);
        int h = 1 + static_cast<int>(seeds() % 40);
        double p = 0.2 + 0.6 * (rep % 5) / 4.0;
        auto m = random_mask(w, h, p, seeds());
        auto got = bdp::squared_edt(m);
        auto want = oracle::brute_squared_edt(m);
        bool all_background_absent = true;
        for (auto v : m.data) all_background_absent &= (v != 0);
        if (all_background_absent) continue;  // unreachable case, checked separately
        for (size_t i = 0; i < got.data.size(); ++i) CHECK(got.data[i] == want.data[i]);
    }
}

TEST_CASE("matches brute force on structured masks") {
    // Disks, stripes and frames exercise the envelope code differently from
    // iid noise.
    auto check = [](const Mask& m) {
        auto got = bdp::squared_edt(m);
        auto want = oracle::brute_squared_edt(m);
        for (size_t i = 0; i < got.data.size(); ++i) REQUIRE(got.data[i] == want.data[i]);
    };
    check(disk_mask(33, 29, 16.0, 14.0, 11.3));
    Mask stripes(24, 24);
    for (int y = 0; y < 24; ++y)
        for (int x = 0; x < 24; ++x) stripes.at(x, y) = (x / 3) % 2;
    check(stripes);
    Mask frame(20, 20, 0);
    for (int y = 4; y < 16; ++y)
        for (int x = 4; x < 16; ++x) frame.at(x, y) = 1;
    for (int y = 8; y < 12; ++y)
        for (int x = 8; x < 12; ++x) frame.at(x, y) = 0;
    check(frame);
}

TEST_CASE("all-foreground raster reports unreachable values") {
    Mask m(6, 4, 1);
    auto sq = bdp::squared_edt(m);
    for (auto v : sq.data) CHECK(v >= static_cast<int64_t>(m.width + m.height) * (m.width + m.height));
}

TEST_CASE("degenerate shapes") {
    SUBCASE("1x1 background") {
        Mask m(1, 1, 0);
        CHECK(bdp::squared_edt(m).at(0, 0) == 0);
    }
    SUBCASE("single row") {
        Mask m(7, 1, 1);
        m.at(0, 0) = 0;
        auto sq = bdp::squared_edt(m);
        for (int x = 0; x < 7; ++x) CHECK(sq.at(x, 0) == static_cast<int64_t>(x) * x);
    }
    SUBCASE("single column") {
        Mask m(1, 5, 1);
        m.at(0, 4) = 0;
        auto sq = bdp::squared_edt(m);
        for (int y = 0; y < 5; ++y) CHECK(sq.at(0, y) == static_cast<int64_t>(4 - y) * (4 - y));
    }
}

TEST_CASE("euclidean not chamfer on a known layout") {
    // Distance 5 = sqrt(25) from (3,4) offsets; a chamfer approximation
    // would give 3 + 4 scaled weights instead.
    Mask m(16, 16, 1);
    m.at(2, 3) = 0;
    auto sq = bdp::squared_edt(m);
    CHECK(sq.at(5, 7) == 25);
    CHECK(sq.at(2 + 5, 3 + 12) == 169);
}

TEST_CASE("float wrapper is sqrt of exact values") {
    auto m = random_mask(21, 13, 0.6, 99);
    auto sq = bdp::squared_edt(m);
    auto d = bdp::edt(m);
    for (size_t i = 0; i < sq.data.size(); ++i)
        CHECK(d.data[i] == doctest::Approx(std::sqrt(double(sq.data[i]))).epsilon(1e-14));
}
