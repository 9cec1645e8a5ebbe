#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "selfrocket/dataset.hpp"
#include "selfrocket/types.hpp"

namespace selfrocket {

// Fixed convolution kernel: length 9, weights in {-1, 2}, exactly three 2s.
struct Kernel {
    std::array<std::int8_t, 9> weights{};
};

inline constexpr int kKernelLength = 9;
inline constexpr int kNumKernels = 84; // C(9,3) placements of the three 2s

// All 84 kernels, 2-positions in lexicographic order. Weights sum to zero.
const std::array<Kernel, kNumKernels>& kernel_bank();

// y[t+1] - y[t]; output has one fewer sample.
std::vector<double> first_difference(std::span<const double> x);

// Everything needed to reproduce one representation's feature matrix.
// Feature columns are laid out kernel-major, then dilation, then slot:
//   column(k, d_idx, s) = k * slots_per_kernel + slot_offset[d_idx] + s
// and biases follow the same order. Padding alternates per (kernel, dilation)
// group in that same layout order.
struct TransformPlan {
    Representation rep = Representation::kBase;
    std::size_t input_length = 0; // length AFTER the representation is applied
    std::vector<int> dilations;
    std::vector<int> features_per_dilation; // one entry per dilation
    std::vector<double> biases;             // num_features() entries
    std::vector<std::uint8_t> paddings;     // num_features() entries, 0/1
    std::uint64_t seed = 0;

    int slots_per_kernel() const;
    std::size_t num_features() const { return static_cast<std::size_t>(kNumKernels) * slots_per_kernel(); }
    // Raw series length this plan expects (undoes the representation).
    std::size_t raw_length() const { return input_length + (rep == Representation::kDiff ? 1 : 0); }
};

// Fit dilations, feature slots, paddings and bias quantiles on the training
// set. num_features_target is rounded down to a multiple of 84.
TransformPlan fit_plan(const TimeSeriesDataset& train, std::size_t num_features_target,
                       Representation rep, std::uint64_t seed);

// Dilated convolution with a length-9 kernel.
// padding=false: out[i] = sum_j w[j]*x[i + j*d], length len(x) - 8d (requires 8d < len).
// padding=true:  zero-pad 4d on each side, output length = len(x).
std::vector<double> convolve_dilated(std::span<const double> x, const Kernel& k, int dilation, bool padding);

// Pool an (already bias-shifted) activation map. "Positive" always means > 0.
double pool(std::span<const double> z, PoolingOp op);

// All five pooled values of (z - bias) in one pass, without materializing z-bias.
struct PooledValues {
    double ppv, gmp, mpv, mipv, lspv;
    double get(PoolingOp op) const;
};
PooledValues pool_all(std::span<const double> z, double bias);
double pool_one(std::span<const double> z, double bias, PoolingOp op);

// Process-wide invocation counters, one per pooling operator, bumped once per
// activation map pooled through that operator's code path. Test hook for the
// "prediction computes only the selected combo" guarantee.
std::array<std::uint64_t, kNumPoolingOps> pooling_op_counts();
void reset_pooling_op_counts();

// One feature matrix per (representation, pooling op). MIX is not stored: it
// is the BASE and DIFF matrices side by side, exposed through ComboFeatures.
struct FeatureBundle {
    std::array<Matrix, kNumPoolingOps> base;
    std::array<Matrix, kNumPoolingOps> diff;

    const Matrix& matrix(Representation rep, PoolingOp po) const;
};

// Non-owning column-concatenated view over one combo's features.
class ComboFeatures {
public:
    ComboFeatures(const Matrix* first, const Matrix* second);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double at(std::size_t r, std::size_t c) const {
        return c < split_ ? first_->at(r, c) : second_->at(r, c - split_);
    }
    // Copy selected rows x columns into a dense row-major block (out must hold
    // rows.size()*cols.size() doubles).
    void gather(std::span<const std::uint32_t> rows, std::span<const std::uint32_t> cols, double* out) const;

private:
    const Matrix* first_;
    const Matrix* second_; // nullptr unless MIX
    std::size_t rows_, cols_, split_;
};

ComboFeatures combo_view(const FeatureBundle& fb, ComboId id);

// Feature matrices for every pooling operator under BASE and DIFF (MIX views
// come for free). Plans must contain kBase and kDiff entries fitted on data
// of this series length.
FeatureBundle transform(const TimeSeriesDataset& ds, const TransformPlan& base_plan, const TransformPlan& diff_plan);

// Feature matrix for a single combo, computing only what that combo needs.
// The prediction path uses this so the other 14 combos cost nothing.
Matrix transform_single(const TimeSeriesDataset& ds, ComboId id, const TransformPlan* base_plan,
                        const TransformPlan* diff_plan);

} // namespace selfrocket
