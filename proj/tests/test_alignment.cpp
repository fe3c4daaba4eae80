#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bdprof/alignment.hpp"

using bdp::ExpressionCurve;
using bdp::RegisterOptions;

namespace {

template <typename F>
ExpressionCurve curve_from(F&& f) {
    ExpressionCurve c;
    for (int i = 0; i < bdp::kGridSize; ++i) c.values[i] = f(bdp::grid_r(i));
    return c;
}

double bump(double r) { return 0.3 + std::exp(-std::pow((r - 0.9) / 0.4, 2)); }

double curve_area(const ExpressionCurve& c) {
    return bdp::riemann_sum(std::vector<double>(c.values.begin(), c.values.end()));
}

// Template dilated by f, then rescaled to unit area: the standard recovery fixture.
ExpressionCurve dilated_input(const ExpressionCurve& tmpl, double f) {
    return bdp::scale_curve(bdp::dilate_curve(tmpl, f));
}

double geomean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += std::log(x);
    return std::exp(s / v.size());
}

}  // namespace

TEST_CASE("scaling a constant curve") {
    auto c = curve_from([](double) { return 3.0; });
    auto s = bdp::scale_curve(c);
    for (double v : s.values) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(s.scale == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(std::fabs(curve_area(s) - 1.0) < 1e-6);
}

TEST_CASE("scaling is exactly idempotent") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.1, 5.0);
    auto c = curve_from([&](double) { return u(rng); });
    auto s1 = bdp::scale_curve(c);
    auto s2 = bdp::scale_curve(s1);
    for (int i = 0; i < bdp::kGridSize; ++i) CHECK(s2.values[i] == s1.values[i]);
    CHECK(s2.scale == s1.scale);
}

TEST_CASE("scaling a linear curve approximates the closed-form area") {
    auto c = curve_from([](double r) { return r; });
    auto s = bdp::scale_curve(c);
    CHECK(std::fabs(s.scale - 2.0) / 2.0 < 0.01);  // Riemann sum gives 2.01
    for (int i = 0; i < bdp::kGridSize; ++i)
        CHECK(std::fabs(s.values[i] - bdp::grid_r(i) / 2.0) < 0.01);
}

TEST_CASE("scaling rejects nonpositive area") {
    auto zero = curve_from([](double) { return 0.0; });
    CHECK_THROWS_AS(bdp::scale_curve(zero), bdp::DataError);
    auto neg = curve_from([](double) { return -1.0; });
    CHECK_THROWS_AS(bdp::scale_curve(neg), bdp::DataError);
}

TEST_CASE("scale correlation") {
    std::vector<double> a = {1.0, 2.0, 3.0, 4.0};
    std::vector<double> b = {-1.0, -2.0, -3.0, -4.0};
    CHECK(bdp::scale_correlation(a, a) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(bdp::scale_correlation(a, b) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK_THROWS_AS(bdp::scale_correlation(a, {1.0, 2.0, 3.0}), bdp::DataError);
    CHECK_THROWS_AS(bdp::scale_correlation({1.0, 2.0}, {1.0, 2.0}), bdp::DataError);
    CHECK_THROWS_AS(bdp::scale_correlation(a, {5.0, 5.0, 5.0, 5.0}), bdp::DataError);
}

TEST_CASE("dilation by 1 is the identity") {
    auto c = curve_from(bump);
    auto d = bdp::dilate_curve(c, 1.0);
    for (int i = 0; i < bdp::kGridSize; ++i)
        CHECK(d.values[i] == doctest::Approx(c.values[i]).epsilon(1e-12));
    CHECK_FALSE(d.extrapolated_high);
    CHECK(d.dilation == doctest::Approx(1.0));
}

TEST_CASE("dilating a linear curve is exact and flags the stretched tail") {
    auto c = curve_from([](double r) { return r; });
    auto d = bdp::dilate_curve(c, 1.1);
    for (int i = 0; i < bdp::kGridSize; ++i)
        CHECK(std::fabs(d.values[i] - 1.1 * bdp::grid_r(i)) < 1e-6);
    CHECK(d.extrapolated_high);  // needed values beyond r = 2
    auto shrunk = bdp::dilate_curve(c, 0.9);
    CHECK_FALSE(shrunk.extrapolated_high);
}

TEST_CASE("dilation round trip") {
    auto c = curve_from(bump);
    auto rt = bdp::dilate_curve(bdp::dilate_curve(c, 1.25), 0.8);
    CHECK(rt.dilation == doctest::Approx(1.0).epsilon(1e-12));
    for (int i = 0; i < bdp::kGridSize; ++i) {
        if (bdp::grid_r(i) > 1.6) break;  // tail beyond 1.6 passed through extrapolation
        CHECK(std::fabs(rt.values[i] - c.values[i]) < 1e-3);
    }
}

TEST_CASE("dilation rejects out-of-range factors") {
    auto c = curve_from(bump);
    CHECK_THROWS_AS(bdp::dilate_curve(c, 0.4), bdp::ConfigError);
    CHECK_THROWS_AS(bdp::dilate_curve(c, 2.5), bdp::ConfigError);
}

TEST_CASE("registering identical curves is a fixed point") {
    auto tmpl = bdp::scale_curve(curve_from(bump));
    std::vector<ExpressionCurve> curves = {tmpl, tmpl, tmpl};
    auto res = bdp::register_within(curves);
    REQUIRE(res.dilations.size() == 3);
    for (double d : res.dilations) CHECK(d == 1.0);
    REQUIRE(res.sse_trace.size() == 2);  // initial criterion + one iteration
    CHECK(res.sse_trace[0] <= 1e-25);    // zero up to mean-accumulation roundoff
    CHECK(res.sse_trace[1] <= 1e-25);
    CHECK(res.warnings.empty());
    for (const auto& r : res.registered)
        for (int i = 0; i < bdp::kGridSize; ++i)
            CHECK(r.values[i] == doctest::Approx(tmpl.values[i]).epsilon(1e-12));
}

TEST_CASE("within-group registration recovers known dilation factors") {
    auto tmpl = bdp::scale_curve(curve_from(bump));
    std::vector<double> factors = {0.9, 1.0, 1.1};
    std::vector<ExpressionCurve> curves;
    for (double f : factors) curves.push_back(dilated_input(tmpl, f));
    auto res = bdp::register_within(curves);

    double gf = geomean(factors);
    for (size_t k = 0; k < factors.size(); ++k)
        CHECK(std::fabs(res.dilations[k] - gf / factors[k]) < 0.02);
    CHECK(std::fabs(geomean(res.dilations) - 1.0) < 1e-9);
    for (size_t i = 1; i < res.sse_trace.size(); ++i)
        CHECK(res.sse_trace[i] <= res.sse_trace[i - 1] * (1.0 + 1e-9));
    CHECK(res.sse_trace.back() < res.sse_trace.front());
    CHECK(res.warnings.empty());  // interior optimum, no bracket warnings
}

TEST_CASE("registration descent on a noisy fixture") {
    auto tmpl = bdp::scale_curve(curve_from(bump));
    std::mt19937_64 rng(12);
    std::normal_distribution<double> z(0.0, 0.01);
    std::uniform_real_distribution<double> fu(0.85, 1.15);
    std::vector<ExpressionCurve> curves;
    for (int k = 0; k < 6; ++k) {
        auto c = dilated_input(tmpl, fu(rng));
        for (double& v : c.values) v = std::max(0.05, v + z(rng));
        curves.push_back(bdp::scale_curve(c));
    }
    auto res = bdp::register_within(curves);
    for (size_t i = 1; i < res.sse_trace.size(); ++i)
        CHECK(res.sse_trace[i] <= res.sse_trace[i - 1] * (1.0 + 1e-9));
    CHECK(res.mean_curves.size() == 1);
    CHECK(res.registered.size() == 6);
}

TEST_CASE("a common input dilation does not change the registration") {
    auto tmpl = bdp::scale_curve(curve_from(bump));
    std::vector<double> factors = {0.9, 1.0, 1.1};
    std::vector<ExpressionCurve> curves, shifted;
    const double c = 0.95;
    for (double f : factors) {
        curves.push_back(dilated_input(tmpl, f));
        shifted.push_back(bdp::scale_curve(bdp::dilate_curve(curves.back(), c)));
    }
    auto base = bdp::register_within(curves);
    auto moved = bdp::register_within(shifted);
    for (size_t k = 0; k < factors.size(); ++k)
        CHECK(std::fabs(base.dilations[k] - moved.dilations[k]) < 2e-3);
    // registered curves agree with the common-dilated originals up to the
    // amplitude factor introduced by rescaling
    for (size_t k = 0; k < factors.size(); ++k) {
        auto expect = bdp::dilate_curve(base.registered[k], c);
        double amp = 1.0 / curve_area(bdp::dilate_curve(curves[k], c));
        for (int i = 0; i < bdp::kGridSize; ++i) {
            if (bdp::grid_r(i) > 1.5) break;
            CHECK(std::fabs(moved.registered[k].values[i] - amp * expect.values[i]) < 1e-3);
        }
    }
}

TEST_CASE("a factor outside the search interval trips the bracket warning") {
    // ratio 1/0.5 = 2 exceeds what [0.7, 1.3] can express, so a bound must bind
    auto tmpl = bdp::scale_curve(curve_from(bump));
    std::vector<ExpressionCurve> curves = {tmpl, dilated_input(tmpl, 0.5)};
    auto res = bdp::register_within(curves);
    REQUIRE_FALSE(res.warnings.empty());
    CHECK(res.warnings.front().code == "dilation_bracket_bound");
}

TEST_CASE("between-group registration") {
    auto tmpl = bdp::scale_curve(curve_from(bump));
    std::vector<double> mc(tmpl.values.begin(), tmpl.values.end());

    SUBCASE("identical means give exactly 1") {
        CHECK(bdp::register_between(mc, mc) == 1.0);
    }
    SUBCASE("constructed dilation is recovered both ways") {
        auto stretched = bdp::dilate_curve(tmpl, 1.0 / 0.95);  // A(r) = C(r / 0.95)
        std::vector<double> ma(stretched.values.begin(), stretched.values.end());
        CHECK(std::fabs(bdp::register_between(ma, mc) - 0.95) < 0.01);

        auto squeezed = bdp::dilate_curve(tmpl, 0.95);  // A(r) = C(0.95 r)
        std::vector<double> ma2(squeezed.values.begin(), squeezed.values.end());
        CHECK(std::fabs(bdp::register_between(ma2, mc) - 1.0 / 0.95) < 0.01);
    }
    SUBCASE("wrong grid length is rejected") {
        CHECK_THROWS_AS(bdp::register_between(std::vector<double>(100, 1.0), mc), bdp::DataError);
    }
}

TEST_CASE("registering identical pairs is a fixed point") {
    auto ty = bdp::scale_curve(curve_from(bump));
    auto tr = bdp::scale_curve(curve_from([](double r) { return 0.2 + r * std::exp(-r); }));
    std::vector<std::pair<ExpressionCurve, ExpressionCurve>> pairs(3, {ty, tr});
    auto res = bdp::register_paired(pairs);
    for (double d : res.dilations) CHECK(d == 1.0);
    CHECK(res.sse_trace.back() <= 1e-25);
    CHECK(res.registered.size() == 6);
    CHECK(res.mean_curves.size() == 2);
}

TEST_CASE("paired registration recovers per-cell factors shared by both channels") {
    auto ty = bdp::scale_curve(curve_from([](double r) { return 0.3 + std::exp(-std::pow((r - 0.8) / 0.35, 2)); }));
    auto tr = bdp::scale_curve(curve_from([](double r) { return 0.3 + std::exp(-std::pow((r - 1.3) / 0.4, 2)); }));
    std::vector<double> factors = {0.92, 1.0, 1.08, 0.97};
    std::vector<std::pair<ExpressionCurve, ExpressionCurve>> pairs;
    for (double f : factors) pairs.emplace_back(dilated_input(ty, f), dilated_input(tr, f));
    auto res = bdp::register_paired(pairs);
    double gf = geomean(factors);
    for (size_t k = 0; k < factors.size(); ++k)
        CHECK(std::fabs(res.dilations[k] - gf / factors[k]) < 0.02);
    for (size_t i = 1; i < res.sse_trace.size(); ++i)
        CHECK(res.sse_trace[i] <= res.sse_trace[i - 1] * (1.0 + 1e-9));
}

TEST_CASE("paired registration with duplicated channels matches the within fit") {
    auto tmpl = bdp::scale_curve(curve_from(bump));
    std::vector<double> factors = {0.93, 1.02, 1.06};
    std::vector<ExpressionCurve> curves;
    std::vector<std::pair<ExpressionCurve, ExpressionCurve>> pairs;
    for (double f : factors) {
        curves.push_back(dilated_input(tmpl, f));
        pairs.emplace_back(curves.back(), curves.back());
    }
    auto within = bdp::register_within(curves);
    auto paired = bdp::register_paired(pairs);
    REQUIRE(within.dilations.size() == paired.dilations.size());
    for (size_t k = 0; k < factors.size(); ++k)
        CHECK(paired.dilations[k] == within.dilations[k]);
    REQUIRE(within.sse_trace.size() == paired.sse_trace.size());
    for (size_t i = 0; i < within.sse_trace.size(); ++i)
        CHECK(paired.sse_trace[i] == doctest::Approx(2.0 * within.sse_trace[i]).epsilon(1e-12));
}

TEST_CASE("registration rejects bad input") {
    auto tmpl = bdp::scale_curve(curve_from(bump));
    CHECK_THROWS_AS(bdp::register_within({tmpl}), bdp::DataError);
    auto unscaled = curve_from(bump);
    CHECK_THROWS_AS(bdp::register_within({tmpl, unscaled}), bdp::DataError);
    RegisterOptions bad;
    bad.delta_lo = 1.5;
    bad.delta_hi = 1.2;
    CHECK_THROWS_AS(bdp::register_within({tmpl, tmpl}, bad), bdp::ConfigError);
    CHECK_THROWS_AS(bdp::register_paired({{tmpl, tmpl}}), bdp::DataError);
}
