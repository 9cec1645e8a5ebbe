#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "selfrocket/error.hpp"
#include "selfrocket/ridge.hpp"
#include "selfrocket/rng.hpp"

using namespace selfrocket;

namespace {

RowMatrixXd random_matrix(Eigen::Index n, Eigen::Index f, std::uint64_t seed, double lo = -2.0, double hi = 2.0) {
    Rng rng(seed);
    RowMatrixXd X(n, f);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < f; ++j) X(i, j) = rng.uniform(lo, hi);
    return X;
}

std::vector<int> cycle_labels(Eigen::Index n, int classes) {
    std::vector<int> y(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = static_cast<int>(i % classes);
    return y;
}

// Standardization and target centering exactly as fit_ridge freezes them.
void frozen_inputs(const RowMatrixXd& X, const std::vector<int>& y, int classes, Eigen::MatrixXd& Xs,
                   Eigen::MatrixXd& Yc) {
    Xs = X;
    Eigen::VectorXd means, scales;
    standardize_columns(Xs, means, scales);
    const Eigen::MatrixXd Y = one_vs_rest_targets(y, classes);
    Yc = Y.rowwise() - Y.colwise().mean();
}

} // namespace

TEST_CASE("two separable points classify correctly at every grid alpha") {
    RowMatrixXd X(2, 1);
    X << -1.0, 1.0;
    const std::vector<int> y{0, 1};
    for (double a : default_alpha_grid()) {
        const double grid[1] = {a};
        const RidgeModel m = fit_ridge(X, y, 2, grid);
        CHECK(ridge_predict(m, X) == y);
    }
}

TEST_CASE("the default alpha grid spans 1e-3 to 1e3 in 10 log-spaced steps") {
    const auto g = default_alpha_grid();
    REQUIRE(g.size() == 10);
    CHECK(g.front() == doctest::Approx(1e-3).epsilon(1e-12));
    CHECK(g.back() == doctest::Approx(1e3).epsilon(1e-12));
    for (std::size_t i = 1; i < g.size(); ++i)
        CHECK(g[i] / g[i - 1] == doctest::Approx(std::pow(10.0, 6.0 / 9.0)).epsilon(1e-10));
}

TEST_CASE("standardize_columns leaves mean 0, population sd 1, and floors constants") {
    Eigen::MatrixXd X(4, 3);
    X << 1, 5, 7, 2, 5, 9, 3, 5, 11, 4, 5, 13;
    Eigen::VectorXd means, scales;
    standardize_columns(X, means, scales);
    CHECK(means(0) == doctest::Approx(2.5));
    CHECK(means(1) == doctest::Approx(5.0));
    CHECK(scales(1) == 1e-8); // constant column hits the floor
    for (int j = 0; j < 3; ++j) {
        CHECK(X.col(j).mean() == doctest::Approx(0.0).epsilon(1e-12));
        if (j != 1) CHECK(std::sqrt(X.col(j).squaredNorm() / 4.0) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("fitted weights satisfy the standardized normal equations") {
    const RowMatrixXd X = random_matrix(20, 50, 101);
    const std::vector<int> y = cycle_labels(20, 3);
    const RidgeModel m = fit_ridge(X, y, 3);

    Eigen::MatrixXd Xs, Yc;
    frozen_inputs(X, y, 3, Xs, Yc);
    const Eigen::MatrixXd lhs =
        (Xs.transpose() * Xs + m.alpha * Eigen::MatrixXd::Identity(50, 50)) * m.weights.transpose();
    const Eigen::MatrixXd rhs = Xs.transpose() * Yc;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("normal equations also hold in the tall regime (n > F)") {
    const RowMatrixXd X = random_matrix(40, 7, 103);
    const std::vector<int> y = cycle_labels(40, 2);
    const RidgeModel m = fit_ridge(X, y, 2);

    Eigen::MatrixXd Xs, Yc;
    frozen_inputs(X, y, 2, Xs, Yc);
    const Eigen::MatrixXd lhs =
        (Xs.transpose() * Xs + m.alpha * Eigen::MatrixXd::Identity(7, 7)) * m.weights.transpose();
    CHECK((lhs - Xs.transpose() * Yc).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("duplicating every column at doubled alpha reproduces the original model") {
    // With [X, X] each pair carries half the original weight, so the ridge
    // penalty on the pair is half that of the merged weight; doubling alpha
    // restores it exactly and the effective predictor is unchanged.
    const Eigen::Index n = 12, f = 6;
    const RowMatrixXd X = random_matrix(n, f, 107);
    RowMatrixXd Xdup(n, 2 * f);
    Xdup.leftCols(f) = X;
    Xdup.rightCols(f) = X;
    const std::vector<int> y = cycle_labels(n, 2);

    const double a = 0.7;
    const double grid_single[1] = {a};
    const double grid_double[1] = {2.0 * a};
    const RidgeModel dedup = fit_ridge(X, y, 2, grid_single);
    const RidgeModel dup = fit_ridge(Xdup, y, 2, grid_double);

    for (int c = 0; c < 2; ++c)
        for (Eigen::Index j = 0; j < f; ++j) {
            CHECK(std::abs(dup.weights(c, j) - 0.5 * dedup.weights(c, j)) < 1e-8);
            CHECK(std::abs(dup.weights(c, f + j) - 0.5 * dedup.weights(c, j)) < 1e-8);
        }

    const RowMatrixXd T = random_matrix(8, f, 131);
    RowMatrixXd Tdup(8, 2 * f);
    Tdup.leftCols(f) = T;
    Tdup.rightCols(f) = T;
    const Eigen::MatrixXd s1 = ridge_scores(dedup, T);
    const Eigen::MatrixXd s2 = ridge_scores(dup, Tdup);
    CHECK((s1 - s2).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(ridge_predict(dedup, T) == ridge_predict(dup, Tdup));
}

TEST_CASE("closed-form LOO residuals match explicit refits, wide regime (n <= F)") {
    const RowMatrixXd X = random_matrix(12, 30, 109);
    const std::vector<int> y = cycle_labels(12, 3);
    Eigen::MatrixXd Xs, Yc;
    frozen_inputs(X, y, 3, Xs, Yc);
    for (double a : {1e-3, 1.0, 1e3}) {
        const Eigen::MatrixXd fast = loo_residuals_closed_form(Xs, Yc, a);
        const Eigen::MatrixXd slow = oracle::loo_refit(Xs, Yc, a);
        CHECK((fast - slow).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("closed-form LOO residuals match explicit refits, tall regime (n > F)") {
    const RowMatrixXd X = random_matrix(25, 8, 111);
    const std::vector<int> y = cycle_labels(25, 2);
    Eigen::MatrixXd Xs, Yc;
    frozen_inputs(X, y, 2, Xs, Yc);
    for (double a : {1e-3, 1.0, 1e3}) {
        const Eigen::MatrixXd fast = loo_residuals_closed_form(Xs, Yc, a);
        const Eigen::MatrixXd slow = oracle::loo_refit(Xs, Yc, a);
        CHECK((fast - slow).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("alpha selection is the LOO argmin with first-index tie-breaking") {
    const RowMatrixXd X = random_matrix(15, 10, 113);
    const std::vector<int> y = cycle_labels(15, 2);
    const RidgeModel m = fit_ridge(X, y, 2);
    REQUIRE(m.loo_errors.size() == m.alpha_grid.size());

    std::size_t best = 0;
    for (std::size_t i = 1; i < m.loo_errors.size(); ++i)
        if (m.loo_errors[i] < m.loo_errors[best]) best = i;
    CHECK(m.alpha == m.alpha_grid[best]);
    for (double e : m.loo_errors) {
        CHECK(std::isfinite(e));
        CHECK(e >= 0.0);
    }
}

TEST_CASE("weight norms shrink monotonically as alpha grows") {
    const RowMatrixXd X = random_matrix(18, 12, 115);
    const std::vector<int> y = cycle_labels(18, 2);
    double prev = std::numeric_limits<double>::infinity();
    for (double a : {1e-3, 1e-1, 1e1, 1e3, 1e5}) {
        const double grid[1] = {a};
        const RidgeModel m = fit_ridge(X, y, 2, grid);
        const double norm = m.weights.norm();
        CHECK(norm <= prev + 1e-12);
        prev = norm;
    }
}

TEST_CASE("rescaling a feature column does not change predictions") {
    const RowMatrixXd X = random_matrix(16, 9, 117);
    RowMatrixXd X5 = X;
    X5.col(3) *= 5.0;
    const std::vector<int> y = cycle_labels(16, 3);
    const RidgeModel a = fit_ridge(X, y, 3);
    const RidgeModel b = fit_ridge(X5, y, 3);

    const RowMatrixXd T = random_matrix(20, 9, 119);
    RowMatrixXd T5 = T;
    T5.col(3) *= 5.0;
    CHECK(ridge_predict(a, T) == ridge_predict(b, T5));
    CHECK((ridge_scores(a, T) - ridge_scores(b, T5)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("an all-zero standardized row scores the class intercepts") {
    // Feeding the column means gives standardized zeros, so the decision
    // reduces to the intercepts, i.e. the class frequencies.
    const Eigen::Index n = 8;
    const RowMatrixXd X = random_matrix(n, 5, 121);
    std::vector<int> y{0, 0, 0, 0, 0, 0, 1, 1}; // skewed: intercept of class 0 is larger
    const RidgeModel m = fit_ridge(X, y, 2);
    CHECK(m.intercepts(0) > m.intercepts(1));

    RowMatrixXd mean_row(1, 5);
    mean_row = m.means.transpose();
    const Eigen::MatrixXd s = ridge_scores(m, mean_row);
    CHECK(s(0, 0) == doctest::Approx(m.intercepts(0)).epsilon(1e-12));
    CHECK(s(0, 1) == doctest::Approx(m.intercepts(1)).epsilon(1e-12));
    CHECK(ridge_predict(m, mean_row) == std::vector<int>{0});
}

TEST_CASE("score ties resolve to the lowest class id") {
    // Balanced labels make both intercepts equal; a zero standardized row
    // then ties every class score exactly.
    const RowMatrixXd X = random_matrix(8, 5, 123);
    const std::vector<int> y = cycle_labels(8, 2);
    const RidgeModel m = fit_ridge(X, y, 2);
    RowMatrixXd mean_row(1, 5);
    mean_row = m.means.transpose();
    const Eigen::MatrixXd s = ridge_scores(m, mean_row);
    REQUIRE(s(0, 0) == s(0, 1)); // both intercepts are exactly 0
    CHECK(ridge_predict(m, mean_row) == std::vector<int>{0});
}

TEST_CASE("fit_ridge validates its inputs") {
    const RowMatrixXd X = random_matrix(6, 4, 125);

    CHECK_THROWS_AS(fit_ridge(X, cycle_labels(6, 2), 1), DegenerateLabelsError);
    CHECK_THROWS_AS(fit_ridge(X, {0, 0, 0, 0, 0, 0}, 2), DegenerateLabelsError);
    CHECK_THROWS_AS(fit_ridge(X, {0, 1, 0, 1, 0, 5}, 2), ShapeError); // label out of range
    CHECK_THROWS_AS(fit_ridge(X, {0, 1, 0}, 2), ShapeError);          // label count mismatch

    RowMatrixXd bad = X;
    bad(2, 2) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(fit_ridge(bad, cycle_labels(6, 2), 2), ParseError);

    const RowMatrixXd one = random_matrix(1, 4, 127);
    CHECK_THROWS_AS(fit_ridge(one, {0}, 2), ShapeError);
}

TEST_CASE("ridge_scores rejects a feature-count mismatch") {
    const RowMatrixXd X = random_matrix(10, 6, 129);
    const RidgeModel m = fit_ridge(X, cycle_labels(10, 2), 2);
    const RowMatrixXd wrong = random_matrix(3, 7, 130);
    try {
        ridge_scores(m, wrong);
        FAIL("expected ShapeError");
    } catch (const ShapeError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("7") != std::string::npos);
        CHECK(msg.find("6") != std::string::npos);
    }
}

TEST_CASE("accuracy matches hand counts and validates sizes") {
    CHECK(accuracy({0, 1, 1, 0}, {0, 1, 0, 0}) == 0.75);
    CHECK(accuracy({2, 2}, {2, 2}) == 1.0);
    CHECK(accuracy({0, 1}, {1, 0}) == 0.0);
    CHECK_THROWS_AS(accuracy({0, 1}, {0}), ShapeError);
    CHECK_THROWS_AS(accuracy({}, {}), EmptyInputError);
}
