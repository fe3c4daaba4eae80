#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bdprof/profiles.hpp"

namespace bdp {

// Ridge-penalized Fisher discriminant between two groups of curves.  The
// routines work on plain value vectors of any fixed dimension so small
// fixtures can exercise the algebra; overloads accept ExpressionCurve groups
// on the analysis grid.
using CurveMatrix = std::vector<std::vector<double>>;

struct DiscriminantModel {
    std::vector<double> d_p;      // penalized discriminant direction
    double lambda_ridge = 0.0;
    double tau = 0.0;
    int cv_errors = 0;            // minimum over the searched grid
    double cv_error_rate = 0.0;
    std::vector<double> scores_a, scores_c;       // final-model projections per curve
    std::vector<std::vector<int>> cv_surface;     // [lambda index][tau index] error counts
    std::vector<double> lambda_grid, tau_grid;
};

// W = 0.5 Sigma_A + 0.5 Sigma_C, sample covariances with divisor n - 1.
// Requires at least 2 curves per group and consistent dimensions (DataError).
Eigen::MatrixXd pooled_within_covariance(const CurveMatrix& group_a, const CurveMatrix& group_c);

// Solves (W + lambda I) d = mean_A - mean_C by Cholesky; lambda > 0 keeps the
// system positive definite (ConfigError on lambda <= 0).
std::vector<double> fit_discriminant(const CurveMatrix& group_a, const CurveMatrix& group_c,
                                     double lambda);

std::vector<double> default_lambda_grid();  // 10 log-spaced values in [1e-4, 1e-1]
std::vector<double> default_tau_grid();     // 10 equispaced values in [0.5, 1.5]

// Joint leave-one-out selection of (lambda, tau): every curve is held out,
// the discriminant refit on the rest (a group reduced to one curve
// contributes a zero covariance), and the held-out curve classified as group
// A when d^T g > tau.  The pair minimizing total misclassifications wins;
// ties prefer larger lambda, then tau nearest 1, then smaller tau.  The model
// is refit on all curves at the winner.  Requires >= 2 curves per group and
// >= 6 total; empty grids are a ConfigError.
DiscriminantModel loocv_select(const CurveMatrix& group_a, const CurveMatrix& group_c,
                               const std::vector<double>& lambda_grid = default_lambda_grid(),
                               const std::vector<double>& tau_grid = default_tau_grid());

// ExpressionCurve conveniences.
CurveMatrix curve_matrix(const std::vector<ExpressionCurve>& curves);
Eigen::MatrixXd pooled_within_covariance(const std::vector<ExpressionCurve>& group_a,
                                         const std::vector<ExpressionCurve>& group_c);
std::vector<double> fit_discriminant(const std::vector<ExpressionCurve>& group_a,
                                     const std::vector<ExpressionCurve>& group_c, double lambda);
DiscriminantModel loocv_select(const std::vector<ExpressionCurve>& group_a,
                               const std::vector<ExpressionCurve>& group_c);

}  // namespace bdp
