#include "bdprof/pda.hpp"

#include <cmath>

namespace bdp {
namespace {

void check_dims(const CurveMatrix& group, size_t dim, const char* name) {
    for (const auto& c : group)
        if (c.size() != dim) throw DataError(std::string(name) + ": inconsistent curve dimensions");
}

Eigen::MatrixXd as_matrix(const CurveMatrix& group, size_t dim) {
    Eigen::MatrixXd m(group.size(), dim);
    for (size_t k = 0; k < group.size(); ++k)
        for (size_t i = 0; i < dim; ++i) m(k, i) = group[k][i];
    return m;
}

// Sample covariance with divisor n - 1; a single curve contributes zero.
Eigen::MatrixXd group_cov(const Eigen::MatrixXd& rows) {
    const auto n = rows.rows();
    const auto d = rows.cols();
    if (n < 2) return Eigen::MatrixXd::Zero(d, d);
    Eigen::RowVectorXd mean = rows.colwise().mean();
    Eigen::MatrixXd centered = rows.rowwise() - mean;
    return centered.transpose() * centered / double(n - 1);
}

Eigen::MatrixXd pooled_cov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& c) {
    return 0.5 * group_cov(a) + 0.5 * group_cov(c);
}

// (W + lambda I) d = mean_A - mean_C via LLT.
Eigen::VectorXd solve_discriminant(const Eigen::MatrixXd& a, const Eigen::MatrixXd& c,
                                   double lambda) {
    Eigen::MatrixXd wp = pooled_cov(a, c);
    wp.diagonal().array() += lambda;
    Eigen::VectorXd diff = (a.colwise().mean() - c.colwise().mean()).transpose();
    Eigen::LLT<Eigen::MatrixXd> llt(wp);
    if (llt.info() != Eigen::Success)
        throw NumericError("ridge-penalized covariance failed to factorize");
    return llt.solve(diff);
}

Eigen::MatrixXd drop_row(const Eigen::MatrixXd& m, Eigen::Index row) {
    Eigen::MatrixXd out(m.rows() - 1, m.cols());
    Eigen::Index j = 0;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        if (i != row) out.row(j++) = m.row(i);
    return out;
}

}  // namespace

Eigen::MatrixXd pooled_within_covariance(const CurveMatrix& group_a, const CurveMatrix& group_c) {
    if (group_a.size() < 2 || group_c.size() < 2)
        throw DataError("each group needs at least 2 curves");
    const size_t dim = group_a.front().size();
    if (dim == 0) throw DataError("curves must have positive dimension");
    check_dims(group_a, dim, "group A");
    check_dims(group_c, dim, "group C");
    return pooled_cov(as_matrix(group_a, dim), as_matrix(group_c, dim));
}

std::vector<double> fit_discriminant(const CurveMatrix& group_a, const CurveMatrix& group_c,
                                     double lambda) {
    if (!(lambda > 0.0)) throw ConfigError("ridge penalty must be positive");
    if (group_a.size() < 2 || group_c.size() < 2)
        throw DataError("each group needs at least 2 curves");
    const size_t dim = group_a.front().size();
    check_dims(group_a, dim, "group A");
    check_dims(group_c, dim, "group C");
    Eigen::VectorXd d =
        solve_discriminant(as_matrix(group_a, dim), as_matrix(group_c, dim), lambda);
    return std::vector<double>(d.data(), d.data() + d.size());
}

std::vector<double> default_lambda_grid() {
    std::vector<double> grid(10);
    for (int i = 0; i < 10; ++i) grid[i] = std::pow(10.0, -4.0 + 3.0 * i / 9.0);
    return grid;
}

std::vector<double> default_tau_grid() {
    std::vector<double> grid(10);
    for (int i = 0; i < 10; ++i) grid[i] = 0.5 + i / 9.0;
    return grid;
}

DiscriminantModel loocv_select(const CurveMatrix& group_a, const CurveMatrix& group_c,
                               const std::vector<double>& lambda_grid,
                               const std::vector<double>& tau_grid) {
    if (lambda_grid.empty() || tau_grid.empty()) throw ConfigError("selection grids are empty");
    for (double l : lambda_grid)
        if (!(l > 0.0)) throw ConfigError("ridge penalties must be positive");
    if (group_a.size() < 2 || group_c.size() < 2)
        throw DataError("each group needs at least 2 curves");
    const int na = static_cast<int>(group_a.size());
    const int nc = static_cast<int>(group_c.size());
    const int n = na + nc;
    if (n < 6) throw DataError("leave-one-out selection needs at least 6 curves");
    const size_t dim = group_a.front().size();
    check_dims(group_a, dim, "group A");
    check_dims(group_c, dim, "group C");

    const Eigen::MatrixXd A = as_matrix(group_a, dim);
    const Eigen::MatrixXd C = as_matrix(group_c, dim);

    DiscriminantModel model;
    model.lambda_grid = lambda_grid;
    model.tau_grid = tau_grid;
    model.cv_surface.assign(lambda_grid.size(), std::vector<int>(tau_grid.size(), 0));

    for (size_t il = 0; il < lambda_grid.size(); ++il) {
        for (int h = 0; h < n; ++h) {
            const bool in_a = h < na;
            Eigen::MatrixXd ta = in_a ? drop_row(A, h) : A;
            Eigen::MatrixXd tc = in_a ? C : drop_row(C, h - na);
            Eigen::VectorXd d = solve_discriminant(ta, tc, lambda_grid[il]);
            Eigen::VectorXd held = (in_a ? A.row(h) : C.row(h - na)).transpose();
            double score = d.dot(held);
            for (size_t it = 0; it < tau_grid.size(); ++it) {
                bool predicted_a = score > tau_grid[it];
                if (predicted_a != in_a) ++model.cv_surface[il][it];
            }
        }
    }

    // minimize errors; ties prefer larger lambda, then tau nearest 1, then smaller tau
    int best_il = 0, best_it = 0, best_count = n + 1;
    for (size_t il = 0; il < lambda_grid.size(); ++il)
        for (size_t it = 0; it < tau_grid.size(); ++it) {
            int count = model.cv_surface[il][it];
            double l = lambda_grid[il], t = tau_grid[it];
            double bl = lambda_grid[best_il], bt = tau_grid[best_it];
            bool better = false;
            if (count != best_count)
                better = count < best_count;
            else if (l != bl)
                better = l > bl;
            else if (std::fabs(t - 1.0) != std::fabs(bt - 1.0))
                better = std::fabs(t - 1.0) < std::fabs(bt - 1.0);
            else
                better = t < bt;
            if (better) {
                best_count = count;
                best_il = static_cast<int>(il);
                best_it = static_cast<int>(it);
            }
        }

    model.lambda_ridge = lambda_grid[best_il];
    model.tau = tau_grid[best_it];
    model.cv_errors = best_count;
    model.cv_error_rate = double(best_count) / n;

    Eigen::VectorXd d = solve_discriminant(A, C, model.lambda_ridge);
    model.d_p.assign(d.data(), d.data() + d.size());
    for (int k = 0; k < na; ++k) model.scores_a.push_back(d.dot(A.row(k).transpose()));
    for (int k = 0; k < nc; ++k) model.scores_c.push_back(d.dot(C.row(k).transpose()));
    return model;
}

CurveMatrix curve_matrix(const std::vector<ExpressionCurve>& curves) {
    CurveMatrix m;
    m.reserve(curves.size());
    for (const auto& c : curves) m.emplace_back(c.values.begin(), c.values.end());
    return m;
}

Eigen::MatrixXd pooled_within_covariance(const std::vector<ExpressionCurve>& group_a,
                                         const std::vector<ExpressionCurve>& group_c) {
    return pooled_within_covariance(curve_matrix(group_a), curve_matrix(group_c));
}

std::vector<double> fit_discriminant(const std::vector<ExpressionCurve>& group_a,
                                     const std::vector<ExpressionCurve>& group_c, double lambda) {
    return fit_discriminant(curve_matrix(group_a), curve_matrix(group_c), lambda);
}

DiscriminantModel loocv_select(const std::vector<ExpressionCurve>& group_a,
                               const std::vector<ExpressionCurve>& group_c) {
    return loocv_select(curve_matrix(group_a), curve_matrix(group_c));
}

}  // namespace bdp
