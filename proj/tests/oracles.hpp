#pragma once

// Independent reference implementations for the test suite. Everything here
// is written the dumb, obviously-correct way (per-element loops, explicit
// refits) so the optimized library paths have something honest to match.

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "selfrocket/dataset.hpp"
#include "selfrocket/transform.hpp"

namespace oracle {

// Direct dilated convolution, one output position at a time, taps visited in
// ascending order. Out-of-range taps are skipped, not added as zeros, to keep
// the floating-point term order identical to what a correct implementation
// produces.
inline std::vector<double> convolve(std::span<const double> x, const selfrocket::Kernel& k, int d, bool padded) {
    const long n = static_cast<long>(x.size());
    std::vector<double> out;
    if (padded) {
        out.resize(x.size());
        for (long i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int j = 0; j < 9; ++j) {
                const long idx = i + static_cast<long>(j - 4) * d;
                if (idx >= 0 && idx < n) acc += static_cast<double>(k.weights[j]) * x[static_cast<std::size_t>(idx)];
            }
            out[static_cast<std::size_t>(i)] = acc;
        }
    } else {
        const long m = n - 8L * d;
        if (m <= 0) return out;
        out.resize(static_cast<std::size_t>(m));
        for (long i = 0; i < m; ++i) {
            double acc = 0.0;
            for (int j = 0; j < 9; ++j)
                acc += static_cast<double>(k.weights[j]) * x[static_cast<std::size_t>(i + static_cast<long>(j) * d)];
            out[static_cast<std::size_t>(i)] = acc;
        }
    }
    return out;
}

// Straight-loop pooling over a fully materialized shifted map s = z - bias.

inline std::vector<double> shifted(std::span<const double> z, double bias) {
    std::vector<double> s(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) s[i] = z[i] - bias;
    return s;
}

inline double ppv(const std::vector<double>& s) {
    std::size_t c = 0;
    for (double v : s)
        if (v > 0.0) ++c;
    return static_cast<double>(c) / static_cast<double>(s.size());
}

inline double gmp(const std::vector<double>& s) {
    double m = s[0];
    for (double v : s)
        if (v > m) m = v;
    return m;
}

inline double mpv(const std::vector<double>& s) {
    double sum = 0.0;
    std::size_t c = 0;
    for (double v : s)
        if (v > 0.0) {
            sum += v;
            ++c;
        }
    return c == 0 ? 0.0 : sum / static_cast<double>(c);
}

inline double mipv(const std::vector<double>& s) {
    double sum = 0.0;
    std::size_t c = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s[i] > 0.0) {
            sum += static_cast<double>(i);
            ++c;
        }
    return c == 0 ? -1.0 : sum / static_cast<double>(c);
}

inline double lspv(const std::vector<double>& s) {
    std::size_t best = 0, run = 0;
    for (double v : s) {
        if (v > 0.0) {
            ++run;
            if (run > best) best = run;
        } else {
            run = 0;
        }
    }
    return static_cast<double>(best);
}

// Leave-one-out residuals by explicit retraining. Xs is already standardized
// and Yc already centered, and both stay frozen across folds (the shortcut
// being tested predicts the residuals of exactly this estimator). Each fold
// solves its own normal equations through LDLT, a different factorization
// route from the library's eigendecomposition.
inline Eigen::MatrixXd loo_refit(const Eigen::MatrixXd& Xs, const Eigen::MatrixXd& Yc, double alpha) {
    const Eigen::Index n = Xs.rows(), F = Xs.cols(), C = Yc.cols();
    Eigen::MatrixXd res(n, C);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::MatrixXd Xi(n - 1, F);
        Eigen::MatrixXd Yi(n - 1, C);
        Eigen::Index r = 0;
        for (Eigen::Index t = 0; t < n; ++t) {
            if (t == i) continue;
            Xi.row(r) = Xs.row(t);
            Yi.row(r) = Yc.row(t);
            ++r;
        }
        const Eigen::MatrixXd G =
            Xi.transpose() * Xi + alpha * Eigen::MatrixXd::Identity(F, F);
        const Eigen::MatrixXd W = G.ldlt().solve(Xi.transpose() * Yi); // F x C
        res.row(i) = Yc.row(i) - Xs.row(i) * W;
    }
    return res;
}

// Nearest-centroid accuracy on externally supplied per-instance feature rows.
inline double nearest_centroid(const std::vector<std::vector<double>>& train_x, const std::vector<int>& train_y,
                               const std::vector<std::vector<double>>& test_x, const std::vector<int>& test_y,
                               int num_classes) {
    const std::size_t dim = train_x[0].size();
    std::vector<std::vector<double>> centroid(num_classes, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> count(num_classes, 0);
    for (std::size_t i = 0; i < train_x.size(); ++i) {
        for (std::size_t d = 0; d < dim; ++d) centroid[train_y[i]][d] += train_x[i][d];
        ++count[train_y[i]];
    }
    for (int c = 0; c < num_classes; ++c)
        for (std::size_t d = 0; d < dim; ++d) centroid[c][d] /= static_cast<double>(count[c]);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < test_x.size(); ++i) {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int c = 0; c < num_classes; ++c) {
            double d2 = 0.0;
            for (std::size_t d = 0; d < dim; ++d) {
                const double diff = test_x[i][d] - centroid[c][d];
                d2 += diff * diff;
            }
            if (d2 < best_d) {
                best_d = d2;
                best = c;
            }
        }
        if (best == test_y[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(test_x.size());
}

// Convenience wrappers: nearest-centroid on raw series and on the per-series
// max (the spike-amplitude statistic).
inline std::vector<std::vector<double>> raw_rows(const selfrocket::TimeSeriesDataset& ds) {
    std::vector<std::vector<double>> out(ds.n);
    for (std::size_t i = 0; i < ds.n; ++i) {
        const auto s = ds.series(i);
        out[i].assign(s.begin(), s.end());
    }
    return out;
}

inline std::vector<std::vector<double>> max_rows(const selfrocket::TimeSeriesDataset& ds) {
    std::vector<std::vector<double>> out(ds.n);
    for (std::size_t i = 0; i < ds.n; ++i) {
        const auto s = ds.series(i);
        double m = s[0];
        for (double v : s)
            if (v > m) m = v;
        out[i] = {m};
    }
    return out;
}

} // namespace oracle
