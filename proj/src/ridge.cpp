#include "selfrocket/ridge.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "selfrocket/error.hpp"

namespace selfrocket {

namespace {

// Eigendecomposition of the smaller Gram system, shared across the alpha grid.
struct LooSolver {
    bool dual; // true: n <= F, work with K = Xs Xs^T; false: work with G = Xs^T Xs
    Eigen::MatrixXd V;    // eigenvectors of K (dual) or P = Xs * Q (primal)
    Eigen::VectorXd lam;  // eigenvalues, clamped at 0
    Eigen::MatrixXd VtY;  // V^T Yc (dual) or P^T Yc (primal)
    Eigen::MatrixXd Q;    // primal only: eigenvectors of G
    const Eigen::MatrixXd* Yc;

    LooSolver(const Eigen::MatrixXd& Xs, const Eigen::MatrixXd& Y) : Yc(&Y) {
        const Eigen::Index n = Xs.rows(), F = Xs.cols();
        dual = n <= F;
        if (dual) {
            const Eigen::MatrixXd K = Xs * Xs.transpose();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
            V = es.eigenvectors();
            lam = es.eigenvalues().cwiseMax(0.0);
            VtY = V.transpose() * Y;
        } else {
            const Eigen::MatrixXd G = Xs.transpose() * Xs;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
            Q = es.eigenvectors();
            lam = es.eigenvalues().cwiseMax(0.0);
            V = Xs * Q; // n x F
            VtY = V.transpose() * Y;
        }
    }

    Eigen::MatrixXd residuals(double alpha) const {
        const Eigen::VectorXd dinv = (lam.array() + alpha).inverse().matrix();
        if (dual) {
            // e_i = [(K+aI)^-1 y]_i / [(K+aI)^-1]_ii
            const Eigen::MatrixXd Ginv_y = V * dinv.asDiagonal() * VtY;
            const Eigen::VectorXd Ginv_diag = (V.array().square().rowwise() * dinv.transpose().array()).rowwise().sum();
            return Ginv_y.array().colwise() / Ginv_diag.array();
        }
        // e_i = (y_i - yhat_i) / (1 - h_ii)
        const Eigen::MatrixXd yhat = V * dinv.asDiagonal() * VtY;
        const Eigen::VectorXd h = (V.array().square().rowwise() * dinv.transpose().array()).rowwise().sum();
        return (*Yc - yhat).array().colwise() / (1.0 - h.array());
    }

    // F x C solution of (Xs^T Xs + alpha I) W = Xs^T Yc.
    Eigen::MatrixXd solve_weights(const Eigen::MatrixXd& Xs, double alpha) const {
        const Eigen::VectorXd dinv = (lam.array() + alpha).inverse().matrix();
        if (dual) {
            const Eigen::MatrixXd dual_coef = V * dinv.asDiagonal() * VtY; // (K+aI)^-1 Yc
            return Xs.transpose() * dual_coef;
        }
        return Q * (dinv.asDiagonal() * VtY); // Q (D+aI)^-1 P^T Yc
    }
};

} // namespace

std::vector<double> default_alpha_grid() {
    std::vector<double> g(10);
    for (int i = 0; i < 10; ++i) g[i] = std::pow(10.0, -3.0 + 6.0 * i / 9.0);
    return g;
}

void standardize_columns(Eigen::Ref<Eigen::MatrixXd> X, Eigen::VectorXd& means, Eigen::VectorXd& scales) {
    const double n = static_cast<double>(X.rows());
    means = X.colwise().mean();
    X.rowwise() -= means.transpose();
    scales = (X.colwise().squaredNorm() / n).cwiseSqrt().cwiseMax(1e-8);
    X.array().rowwise() /= scales.transpose().array();
}

Eigen::MatrixXd one_vs_rest_targets(const std::vector<int>& labels, int num_classes) {
    Eigen::MatrixXd Y = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(labels.size()), num_classes, -1.0);
    for (std::size_t i = 0; i < labels.size(); ++i) Y(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
    return Y;
}

Eigen::MatrixXd loo_residuals_closed_form(const Eigen::MatrixXd& Xs, const Eigen::MatrixXd& Yc, double alpha) {
    return LooSolver(Xs, Yc).residuals(alpha);
}

RidgeModel fit_ridge(const Eigen::Ref<const RowMatrixXd>& X, const std::vector<int>& labels, int num_classes,
                     std::span<const double> alphas) {
    const Eigen::Index n = X.rows(), F = X.cols();
    if (n < 2) throw ShapeError("fit_ridge: need at least 2 rows, got " + std::to_string(n));
    if (static_cast<Eigen::Index>(labels.size()) != n)
        throw ShapeError("fit_ridge: " + std::to_string(labels.size()) + " labels for " + std::to_string(n) + " rows");
    if (num_classes < 2) throw DegenerateLabelsError("fit_ridge: need at least 2 classes");
    if (!X.allFinite()) throw ParseError("fit_ridge: non-finite feature value");

    int distinct = 0;
    {
        std::vector<bool> seen(num_classes, false);
        for (int l : labels) {
            if (l < 0 || l >= num_classes) throw ShapeError("fit_ridge: label id out of range");
            if (!seen[l]) {
                seen[l] = true;
                ++distinct;
            }
        }
    }
    if (distinct < 2) throw DegenerateLabelsError("fit_ridge: training rows contain a single class");

    RidgeModel m;
    m.num_classes = num_classes;
    m.num_features = static_cast<std::size_t>(F);
    m.alpha_grid = alphas.empty() ? default_alpha_grid() : std::vector<double>(alphas.begin(), alphas.end());

    Eigen::MatrixXd Xs = X; // dense copy we standardize in place
    standardize_columns(Xs, m.means, m.scales);

    const Eigen::MatrixXd Y = one_vs_rest_targets(labels, num_classes);
    const Eigen::RowVectorXd ybar = Y.colwise().mean();
    const Eigen::MatrixXd Yc = Y.rowwise() - ybar;

    const LooSolver solver(Xs, Yc);
    m.loo_errors.resize(m.alpha_grid.size());
    std::size_t best = 0;
    double best_err = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < m.alpha_grid.size(); ++a) {
        m.loo_errors[a] = solver.residuals(m.alpha_grid[a]).squaredNorm();
        if (m.loo_errors[a] < best_err) {
            best_err = m.loo_errors[a];
            best = a;
        }
    }
    m.alpha = m.alpha_grid[best];
    m.weights = solver.solve_weights(Xs, m.alpha).transpose(); // C x F
    m.intercepts = ybar.transpose();
    return m;
}

Eigen::MatrixXd ridge_scores(const RidgeModel& m, const Eigen::Ref<const RowMatrixXd>& X) {
    if (X.cols() != static_cast<Eigen::Index>(m.num_features))
        throw ShapeError("ridge: " + std::to_string(X.cols()) + " feature columns, model expects " +
                         std::to_string(m.num_features));
    Eigen::MatrixXd Xs = X;
    Xs.rowwise() -= m.means.transpose();
    Xs.array().rowwise() /= m.scales.transpose().array();
    Eigen::MatrixXd scores = Xs * m.weights.transpose();
    scores.rowwise() += m.intercepts.transpose();
    return scores;
}

std::vector<int> ridge_predict(const RidgeModel& m, const Eigen::Ref<const RowMatrixXd>& X) {
    const Eigen::MatrixXd scores = ridge_scores(m, X);
    std::vector<int> out(static_cast<std::size_t>(scores.rows()));
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        int arg = 0;
        double best = scores(i, 0);
        for (int c = 1; c < m.num_classes; ++c)
            if (scores(i, c) > best) { // strict: ties keep the lowest class id
                best = scores(i, c);
                arg = c;
            }
        out[static_cast<std::size_t>(i)] = arg;
    }
    return out;
}

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
    if (predicted.size() != truth.size())
        throw ShapeError("accuracy: " + std::to_string(predicted.size()) + " predictions vs " +
                         std::to_string(truth.size()) + " labels");
    if (predicted.empty()) throw EmptyInputError("accuracy: empty input");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == truth[i];
    return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

} // namespace selfrocket
