#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "selfrocket/error.hpp"

namespace selfrocket {

// Input representations the transform runs under.
enum class Representation : int {
    kBase = 0, // series as-is
    kDiff = 1, // first difference
    kMix = 2,  // BASE and DIFF features side by side
};

// Pooling operators applied to each bias-shifted activation map.
enum class PoolingOp : int {
    kPpv = 0,  // fraction of strictly positive values
    kGmp = 1,  // global max
    kMpv = 2,  // mean of positive values (0 when none)
    kMipv = 3, // mean of 0-based indices of positive values (-1 when none)
    kLspv = 4, // length of the longest run of consecutive positives (0 when none)
};

inline constexpr int kNumPoolingOps = 5;
inline constexpr int kNumRepresentations = 3;
inline constexpr int kNumCombos = 15;

// One (representation, pooling operator) pair. Enumeration order is
// representation-major: PPV..LSPV, PPV_DIFF..LSPV_DIFF, PPV_MIX..LSPV_MIX.
struct ComboId {
    Representation rep = Representation::kBase;
    PoolingOp po = PoolingOp::kPpv;

    int index() const { return static_cast<int>(rep) * kNumPoolingOps + static_cast<int>(po); }
    static ComboId from_index(int idx);
    bool operator==(const ComboId&) const = default;
};

inline ComboId combo_at(int idx) { return ComboId::from_index(idx); }

inline ComboId ComboId::from_index(int idx) {
    if (idx < 0 || idx >= kNumCombos) throw ConfigError("combo index out of range: " + std::to_string(idx));
    return ComboId{static_cast<Representation>(idx / kNumPoolingOps), static_cast<PoolingOp>(idx % kNumPoolingOps)};
}

const char* pooling_op_name(PoolingOp op);

// Display name: "PPV", "GMP_DIFF", "LSPV_MIX", ...
std::string combo_name(ComboId id);

// Inverse of combo_name; throws ConfigError on unknown token.
ComboId parse_combo(const std::string& name);

inline const ComboId kDefaultCombo{Representation::kMix, PoolingOp::kPpv}; // PPV_MIX

// Dense row-major matrix of doubles. Deliberately plain: transform code fills
// it row by row, ridge maps it into Eigen without copying.
struct Matrix {
    std::vector<double> v;
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : v(r * c), n_rows(r), n_cols(c) {}

    void resize(std::size_t r, std::size_t c) {
        n_rows = r;
        n_cols = c;
        v.assign(r * c, 0.0);
    }

    double& at(std::size_t r, std::size_t c) { return v[r * n_cols + c]; }
    double at(std::size_t r, std::size_t c) const { return v[r * n_cols + c]; }
    std::span<double> row(std::size_t r) { return {v.data() + r * n_cols, n_cols}; }
    std::span<const double> row(std::size_t r) const { return {v.data() + r * n_cols, n_cols}; }
};

} // namespace selfrocket
