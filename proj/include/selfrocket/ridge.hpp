#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "selfrocket/types.hpp"

namespace selfrocket {

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Maps our row-major Matrix into Eigen without copying.
inline Eigen::Map<const RowMatrixXd> as_eigen(const Matrix& m) {
    return {m.v.data(), static_cast<Eigen::Index>(m.n_rows), static_cast<Eigen::Index>(m.n_cols)};
}

// One-vs-rest ridge classifier with leave-one-out alpha selection.
struct RidgeModel {
    int num_classes = 0;
    std::size_t num_features = 0;
    double alpha = 0.0;
    Eigen::MatrixXd weights;    // num_classes x F, acting on standardized features
    Eigen::VectorXd intercepts; // num_classes
    Eigen::VectorXd means;      // F, frozen at fit time
    Eigen::VectorXd scales;     // F, population std floored at 1e-8
    std::vector<double> alpha_grid;
    std::vector<double> loo_errors; // total squared LOO error per grid entry
};

// 10 log-spaced penalties from 1e-3 to 1e3.
std::vector<double> default_alpha_grid();

// Center/scale columns in place; returns the frozen means and scales.
void standardize_columns(Eigen::Ref<Eigen::MatrixXd> X, Eigen::VectorXd& means, Eigen::VectorXd& scales);

// +1/-1 one-vs-rest target matrix (n x num_classes).
Eigen::MatrixXd one_vs_rest_targets(const std::vector<int>& labels, int num_classes);

// Per-sample leave-one-out residuals (n x C) of the no-intercept ridge
// estimator on an already standardized X and centered Y, via the hat-matrix
// identity on the smaller Gram system (n x n when n <= F, else F x F).
// The estimator it shortcuts: refit on the other n-1 rows with X and Y held
// exactly as given (standardization/centering are not refit per fold).
Eigen::MatrixXd loo_residuals_closed_form(const Eigen::MatrixXd& Xs, const Eigen::MatrixXd& Yc, double alpha);

// Standardize, encode targets, pick alpha by summed squared LOO error over the
// grid (first index wins ties), then solve the normal equations at that alpha.
// The eigendecomposition is computed once and reused across the whole grid.
RidgeModel fit_ridge(const Eigen::Ref<const RowMatrixXd>& X, const std::vector<int>& labels, int num_classes,
                     std::span<const double> alphas = {});

// Per-class decision scores (n x C).
Eigen::MatrixXd ridge_scores(const RidgeModel& m, const Eigen::Ref<const RowMatrixXd>& X);

// Argmax of scores, ties toward the lowest class id.
std::vector<int> ridge_predict(const RidgeModel& m, const Eigen::Ref<const RowMatrixXd>& X);

// Fraction of equal entries. Throws on size mismatch or empty input.
double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth);

} // namespace selfrocket
