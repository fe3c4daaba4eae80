#pragma once

#include <vector>

namespace bdp {

// Weighted natural cubic smoothing spline in Reinsch form: minimizes
//   sum_i w_i (y_i - g(t_i))^2 + lambda * int (g'')^2
// over natural cubics with knots at the data sites.  The linear system
// (R + lambda Q^T W^-1 Q) gamma = Q^T y is pentadiagonal and solved by a
// banded Cholesky factorization; cost is O(n) per solve, O(n^2) for the
// hat-matrix trace.
//
// Knots must be strictly increasing, size >= 4, weights > 0.  Evaluation
// outside the knot range continues the natural spline linearly (its second
// derivative vanishes at the end knots, so this is the C1 continuation).
class SmoothingSpline {
public:
    SmoothingSpline(std::vector<double> knots, std::vector<double> values,
                    std::vector<double> weights);

    // Unit weights.
    SmoothingSpline(std::vector<double> knots, std::vector<double> values);

    // Solves at a fixed penalty (lambda >= 0; 0 interpolates).
    void fit(double lambda);

    // Selects lambda by GCV over log10(lambda) in [-8, 2] (golden section),
    // then fits at the winner.  GCV(l) = N * (RSS(l) + rss_offset) / (N - tr A)^2,
    // where N defaults to the knot count; callers fitting binned data pass the
    // original point count and the within-bin sum of squares so the criterion
    // is the one for the full cloud.  A flat criterion (relative spread below
    // 1e-12) falls back to lambda = 1e-4.  Returns the lambda used.
    double fit_gcv(double rss_offset = 0.0, double n_total = 0.0);

    double operator()(double x) const;

    double lambda() const { return lambda_; }
    double edf() const { return edf_; }        // trace of the hat matrix
    double rss() const;                         // weighted RSS at the knots
    bool flat_gcv() const { return flat_gcv_; }
    const std::vector<double>& fitted() const { return g_; }
    size_t knot_count() const { return t_.size(); }

private:
    double trace_hat(double lambda) const;

    std::vector<double> t_, y_, w_, h_;
    std::vector<double> g_;       // fitted values at knots
    std::vector<double> gamma_;   // second derivatives at knots (ends zero)
    double lambda_ = 0.0;
    double edf_ = 0.0;
    bool flat_gcv_ = false;
};

// Periodic cubic smoothing spline with unit weights on a parameter circle of
// the given period.  Same criterion as above with the integral over one
// period and periodic boundary conditions.  The cyclic system is small (one
// unknown per vertex), so it is solved densely.
class PeriodicSmoothingSpline {
public:
    // Knots strictly increasing in [0, period), size >= 3.
    PeriodicSmoothingSpline(std::vector<double> knots, std::vector<double> values, double period);

    void fit(double lambda);
    double operator()(double s) const;  // s is taken modulo the period

    double rss() const;
    double lambda() const { return lambda_; }
    const std::vector<double>& fitted() const { return g_; }

    // Trace of the hat matrix at the given penalty; depends only on the knots,
    // so one call serves both coordinates of a boundary fit.
    double trace_hat(double lambda) const;

private:
    std::vector<double> t_, y_, h_;
    std::vector<double> g_, gamma_;
    double period_;
    double lambda_ = 0.0;
};

// Monotone cubic Hermite interpolant (Fritsch-Carlson slopes).  On a uniform
// grid the interior slope is the harmonic mean of adjacent secants when they
// share a sign and zero otherwise; end slopes use the one-sided three-point
// formula with the standard clamps.  Reproduces linear data exactly.
// Queries outside the node range extrapolate linearly from the two nearest
// node values; eval_below/eval_above report whether that happened since the
// construction of the interpolant.
class Pchip {
public:
    Pchip(std::vector<double> x, std::vector<double> y);  // x strictly increasing, size >= 2

    double operator()(double q) const;
    bool eval_below() const { return below_; }
    bool eval_above() const { return above_; }

private:
    std::vector<double> x_, y_, m_;
    mutable bool below_ = false, above_ = false;
};

}  // namespace bdp
