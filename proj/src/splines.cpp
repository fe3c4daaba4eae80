#include "bdprof/splines.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bdp {
namespace {

constexpr double kGcvLog10Lo = -8.0;
constexpr double kGcvLog10Hi = 2.0;
constexpr double kGcvFallbackLambda = 1e-4;

// Golden-section minimization of f over [a, b]; returns argmin.
template <typename F>
double golden_min(F&& f, double a, double b, double tol) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    return fc < fd ? c : d;
}

}  // namespace

SmoothingSpline::SmoothingSpline(std::vector<double> knots, std::vector<double> values,
                                 std::vector<double> weights)
    : t_(std::move(knots)), y_(std::move(values)), w_(std::move(weights)) {
    const size_t n = t_.size();
    if (n < 4) throw std::invalid_argument("smoothing spline needs at least 4 knots");
    if (w_.empty()) w_.assign(n, 1.0);
    if (y_.size() != n || w_.size() != n) throw std::invalid_argument("knot/value/weight size mismatch");
    h_.resize(n - 1);
    for (size_t i = 0; i + 1 < n; ++i) {
        h_[i] = t_[i + 1] - t_[i];
        if (!(h_[i] > 0)) throw std::invalid_argument("knots must be strictly increasing");
    }
    for (double w : w_)
        if (!(w > 0)) throw std::invalid_argument("weights must be positive");
}

SmoothingSpline::SmoothingSpline(std::vector<double> knots, std::vector<double> values)
    : SmoothingSpline(std::move(knots), std::move(values), std::vector<double>{}) {}

namespace {

// Pentadiagonal symmetric matrix in band storage: band[d][i] = M(i+d, i),
// d = 0..2.  Cholesky in place, then solve.
struct Penta {
    size_t n = 0;
    std::vector<double> b0, b1, b2;  // main, sub, subsub

    void resize(size_t m) {
        n = m;
        b0.assign(m, 0.0);
        b1.assign(m, 0.0);
        b2.assign(m, 0.0);
    }
    double get(size_t i, size_t j) const {  // i >= j
        size_t d = i - j;
        return d == 0 ? b0[j] : d == 1 ? b1[j] : b2[j];
    }
    void cholesky() {
        for (size_t i = 0; i < n; ++i) {
            size_t lo = i >= 2 ? i - 2 : 0;
            for (size_t j = lo; j <= i; ++j) {
                double s = get(i, j);
                size_t klo = (i >= 2 ? i - 2 : 0);
                if (j >= 2 && j - 2 > klo) klo = j - 2;
                for (size_t k = klo; k < j; ++k) s -= get(i, k) * get(j, k);
                if (j < i) {
                    size_t d = i - j;
                    (d == 1 ? b1[j] : b2[j]) = s / b0[j];
                } else {
                    if (!(s > 0)) throw std::runtime_error("banded Cholesky: matrix not positive definite");
                    b0[i] = std::sqrt(s);
                }
            }
        }
    }
    // Solves L L^T x = rhs in place (factorized storage).
    void solve(std::vector<double>& x) const {
        for (size_t i = 0; i < n; ++i) {
            double s = x[i];
            if (i >= 1) s -= b1[i - 1] * x[i - 1];
            if (i >= 2) s -= b2[i - 2] * x[i - 2];
            x[i] = s / b0[i];
        }
        for (size_t i = n; i-- > 0;) {
            double s = x[i];
            if (i + 1 < n) s -= b1[i] * x[i + 1];
            if (i + 2 < n) s -= b2[i] * x[i + 2];
            x[i] = s / b0[i];
        }
    }
};

// Q column c touches rows c, c+1, c+2 with entries q1, q2, q3.
// Builds M = R + lambda * Q^T W^-1 Q (pentadiagonal, order n-2), factorized.
Penta build_reinsch(const std::vector<double>& h, const std::vector<double>& w, double lambda) {
    const size_t m = h.size() - 1;  // = n - 2
    Penta M;
    M.resize(m);
    auto q1 = [&](size_t c) { return 1.0 / h[c]; };
    auto q2 = [&](size_t c) { return -1.0 / h[c] - 1.0 / h[c + 1]; };
    auto q3 = [&](size_t c) { return 1.0 / h[c + 1]; };
    for (size_t c = 0; c < m; ++c) {
        M.b0[c] = (h[c] + h[c + 1]) / 3.0 +
                  lambda * (q1(c) * q1(c) / w[c] + q2(c) * q2(c) / w[c + 1] + q3(c) * q3(c) / w[c + 2]);
        if (c + 1 < m)
            M.b1[c] = h[c + 1] / 6.0 + lambda * (q2(c) * q1(c + 1) / w[c + 1] + q3(c) * q2(c + 1) / w[c + 2]);
        if (c + 2 < m) M.b2[c] = lambda * (q3(c) * q1(c + 2) / w[c + 2]);
    }
    M.cholesky();
    return M;
}

}  // namespace

void SmoothingSpline::fit(double lambda) {
    if (!(lambda >= 0)) throw std::invalid_argument("lambda must be >= 0");
    const size_t n = t_.size();
    const size_t m = n - 2;

    Penta M = build_reinsch(h_, w_, lambda);
    auto q1 = [&](size_t c) { return 1.0 / h_[c]; };
    auto q2 = [&](size_t c) { return -1.0 / h_[c] - 1.0 / h_[c + 1]; };
    auto q3 = [&](size_t c) { return 1.0 / h_[c + 1]; };

    std::vector<double> rhs(m);
    for (size_t c = 0; c < m; ++c)
        rhs[c] = (y_[c + 2] - y_[c + 1]) / h_[c + 1] - (y_[c + 1] - y_[c]) / h_[c];
    M.solve(rhs);

    gamma_.assign(n, 0.0);
    for (size_t c = 0; c < m; ++c) gamma_[c + 1] = rhs[c];

    std::vector<double> qg(n, 0.0);
    for (size_t c = 0; c < m; ++c) {
        qg[c] += rhs[c] * q1(c);
        qg[c + 1] += rhs[c] * q2(c);
        qg[c + 2] += rhs[c] * q3(c);
    }
    g_.resize(n);
    for (size_t r = 0; r < n; ++r) g_[r] = y_[r] - lambda * qg[r] / w_[r];

    lambda_ = lambda;
    edf_ = trace_hat(lambda);
}

double SmoothingSpline::trace_hat(double lambda) const {
    const size_t n = t_.size();
    const size_t m = n - 2;
    if (lambda == 0.0) return static_cast<double>(n);

    Penta M = build_reinsch(h_, w_, lambda);

    // tr A = n - lambda * sum_r (1/w_r) q_r^T M^-1 q_r, with q_r the r-th row
    // of Q (at most three nonzeros, at columns r-2, r-1, r).
    double acc = 0.0;
    std::vector<double> q(m), x(m);
    for (size_t r = 0; r < n; ++r) {
        std::fill(q.begin(), q.end(), 0.0);
        if (r >= 2 && r - 2 < m) q[r - 2] = 1.0 / h_[r - 1];
        if (r >= 1 && r - 1 < m) q[r - 1] = -1.0 / h_[r - 1] - 1.0 / h_[r];
        if (r < m) q[r] = 1.0 / h_[r];
        x = q;
        M.solve(x);
        double dot = 0.0;
        for (size_t c = (r >= 2 ? r - 2 : 0); c < std::min(m, r + 1); ++c) dot += q[c] * x[c];
        acc += dot / w_[r];
    }
    return static_cast<double>(n) - lambda * acc;
}

double SmoothingSpline::rss() const {
    double s = 0.0;
    for (size_t i = 0; i < y_.size(); ++i) s += w_[i] * (y_[i] - g_[i]) * (y_[i] - g_[i]);
    return s;
}

double SmoothingSpline::fit_gcv(double rss_offset, double n_total) {
    const double N = n_total > 0 ? n_total : static_cast<double>(t_.size());
    auto gcv = [&](double log10_lambda) {
        fit(std::pow(10.0, log10_lambda));
        double denom = N - edf_;
        if (denom <= 0) return std::numeric_limits<double>::infinity();
        double r = rss() + rss_offset;
        return N * r / (denom * denom);
    };
    // Flat criterion (degenerate data): fall back to a fixed default.
    double lo = gcv(kGcvLog10Lo), mid = gcv(0.5 * (kGcvLog10Lo + kGcvLog10Hi)), hi = gcv(kGcvLog10Hi);
    double scale = std::max({std::fabs(lo), std::fabs(mid), std::fabs(hi), 1e-300});
    if (std::max({lo, mid, hi}) - std::min({lo, mid, hi}) < 1e-12 * scale) {
        flat_gcv_ = true;
        fit(kGcvFallbackLambda);
        return lambda_;
    }
    flat_gcv_ = false;
    double best = golden_min(gcv, kGcvLog10Lo, kGcvLog10Hi, 1e-3);
    fit(std::pow(10.0, best));
    return lambda_;
}

double SmoothingSpline::operator()(double x) const {
    const size_t n = t_.size();
    if (x <= t_.front()) {
        double slope = (g_[1] - g_[0]) / h_[0] - h_[0] * (2.0 * gamma_[0] + gamma_[1]) / 6.0;
        return g_[0] + slope * (x - t_[0]);
    }
    if (x >= t_.back()) {
        double slope = (g_[n - 1] - g_[n - 2]) / h_[n - 2] + h_[n - 2] * (gamma_[n - 2] + 2.0 * gamma_[n - 1]) / 6.0;
        return g_[n - 1] + slope * (x - t_[n - 1]);
    }
    size_t i = std::upper_bound(t_.begin(), t_.end(), x) - t_.begin() - 1;
    if (i >= n - 1) i = n - 2;
    double hi = h_[i];
    double u = (t_[i + 1] - x) / hi, v = (x - t_[i]) / hi;
    return u * g_[i] + v * g_[i + 1] +
           hi * hi / 6.0 * ((u * u * u - u) * gamma_[i] + (v * v * v - v) * gamma_[i + 1]);
}

PeriodicSmoothingSpline::PeriodicSmoothingSpline(std::vector<double> knots, std::vector<double> values,
                                                 double period)
    : t_(std::move(knots)), y_(std::move(values)), period_(period) {
    const size_t n = t_.size();
    if (n < 3) throw std::invalid_argument("periodic spline needs at least 3 knots");
    if (y_.size() != n) throw std::invalid_argument("knot/value size mismatch");
    if (!(period_ > 0) || t_.front() < 0 || t_.back() >= period_)
        throw std::invalid_argument("knots must lie in [0, period)");
    h_.resize(n);
    for (size_t i = 0; i + 1 < n; ++i) {
        h_[i] = t_[i + 1] - t_[i];
        if (!(h_[i] > 0)) throw std::invalid_argument("knots must be strictly increasing");
    }
    h_[n - 1] = period_ - t_[n - 1] + t_[0];
    if (!(h_[n - 1] > 0)) throw std::invalid_argument("wrap interval must have positive length");
}

namespace {

// Cyclic R and Q for the periodic Reinsch system.
void periodic_system(const std::vector<double>& h, Eigen::MatrixXd& R, Eigen::MatrixXd& Q) {
    const size_t n = h.size();
    R = Eigen::MatrixXd::Zero(n, n);
    Q = Eigen::MatrixXd::Zero(n, n);  // Q(row, col)
    for (size_t i = 0; i < n; ++i) {
        size_t prev = (i + n - 1) % n, next = (i + 1) % n;
        R(i, i) = (h[prev] + h[i]) / 3.0;
        R(i, next) += h[i] / 6.0;
        R(next, i) += h[i] / 6.0;
        Q(prev, i) += 1.0 / h[prev];
        Q(i, i) += -1.0 / h[prev] - 1.0 / h[i];
        Q(next, i) += 1.0 / h[i];
    }
}

}  // namespace

void PeriodicSmoothingSpline::fit(double lambda) {
    if (!(lambda >= 0)) throw std::invalid_argument("lambda must be >= 0");
    const size_t n = t_.size();
    Eigen::MatrixXd R, Q;
    periodic_system(h_, R, Q);
    Eigen::MatrixXd M = R + lambda * Q.transpose() * Q;
    Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y_.data(), n);
    Eigen::VectorXd rhs = Q.transpose() * yv;
    Eigen::VectorXd gamma = M.ldlt().solve(rhs);
    Eigen::VectorXd g = yv - lambda * (Q * gamma);
    gamma_.assign(gamma.data(), gamma.data() + n);
    g_.assign(g.data(), g.data() + n);
    lambda_ = lambda;
}

double PeriodicSmoothingSpline::trace_hat(double lambda) const {
    const size_t n = t_.size();
    if (lambda == 0.0) return static_cast<double>(n);
    Eigen::MatrixXd R, Q;
    periodic_system(h_, R, Q);
    Eigen::MatrixXd M = R + lambda * Q.transpose() * Q;
    Eigen::MatrixXd X = M.ldlt().solve(Q.transpose());  // M^-1 Q^T
    double tr = 0.0;
    for (size_t r = 0; r < n; ++r) tr += Q.row(r) * X.col(r);
    return static_cast<double>(n) - lambda * tr;
}

double PeriodicSmoothingSpline::rss() const {
    double s = 0.0;
    for (size_t i = 0; i < y_.size(); ++i) s += (y_[i] - g_[i]) * (y_[i] - g_[i]);
    return s;
}

double PeriodicSmoothingSpline::operator()(double s) const {
    const size_t n = t_.size();
    double q = std::fmod(s - t_[0], period_);
    if (q < 0) q += period_;
    q += t_[0];  // q in [t_0, t_0 + period)
    size_t i;
    if (q >= t_[n - 1]) {
        i = n - 1;  // wrap interval [t_{n-1}, t_0 + period)
    } else {
        i = std::upper_bound(t_.begin(), t_.end(), q) - t_.begin() - 1;
    }
    size_t j = (i + 1) % n;
    double hi = h_[i];
    double u = ((i == n - 1 ? t_[0] + period_ : t_[i + 1]) - q) / hi;
    double v = 1.0 - u;
    return u * g_[i] + v * g_[j] + hi * hi / 6.0 * ((u * u * u - u) * gamma_[i] + (v * v * v - v) * gamma_[j]);
}

Pchip::Pchip(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const size_t n = x_.size();
    if (n < 2) throw std::invalid_argument("pchip needs at least 2 nodes");
    if (y_.size() != n) throw std::invalid_argument("node/value size mismatch");
    std::vector<double> h(n - 1), d(n - 1);
    for (size_t i = 0; i + 1 < n; ++i) {
        h[i] = x_[i + 1] - x_[i];
        if (!(h[i] > 0)) throw std::invalid_argument("nodes must be strictly increasing");
        d[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    m_.assign(n, 0.0);
    if (n == 2) {
        m_[0] = m_[1] = d[0];
    } else {
        for (size_t i = 1; i + 1 < n; ++i) {
            if (d[i - 1] * d[i] <= 0.0) {
                m_[i] = 0.0;
            } else {
                double w1 = 2.0 * h[i] + h[i - 1], w2 = h[i] + 2.0 * h[i - 1];
                m_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
            }
        }
        auto end_slope = [](double h0, double h1, double d0, double d1) {
            double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
            if (m * d0 <= 0.0) return 0.0;
            if (d0 * d1 <= 0.0 && std::fabs(m) > 3.0 * std::fabs(d0)) return 3.0 * d0;
            return m;
        };
        m_[0] = end_slope(h[0], h[1], d[0], d[1]);
        m_[n - 1] = end_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
    }
}

double Pchip::operator()(double q) const {
    const size_t n = x_.size();
    if (q < x_.front()) {
        below_ = true;
        double slope = (y_[1] - y_[0]) / (x_[1] - x_[0]);
        return y_[0] + slope * (q - x_[0]);
    }
    if (q > x_.back()) {
        above_ = true;
        double slope = (y_[n - 1] - y_[n - 2]) / (x_[n - 1] - x_[n - 2]);
        return y_[n - 1] + slope * (q - x_[n - 1]);
    }
    size_t i = std::upper_bound(x_.begin(), x_.end(), q) - x_.begin();
    if (i > 0) --i;
    if (i >= n - 1) i = n - 2;
    double h = x_[i + 1] - x_[i];
    double t = (q - x_[i]) / h;
    double t2 = t * t, t3 = t2 * t;
    double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t, h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * y_[i] + h * h10 * m_[i] + h01 * y_[i + 1] + h * h11 * m_[i + 1];
}

}  // namespace bdp
