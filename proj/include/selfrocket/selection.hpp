#pragma once

#include <cstdint>
#include <vector>

#include "selfrocket/dataset.hpp"
#include "selfrocket/transform.hpp"
#include "selfrocket/types.hpp"

namespace selfrocket {

struct SelectionConfig {
    int k = 2;        // folds per repeat
    int nr = 10;      // repeats (k*nr voters total)
    int f = 2500;     // feature columns sampled per mini-classifier
    int mds = 500;    // dataset-size threshold between k-fold and subsampled splits
    int top = 5;      // vote validation: chosen combo must rank in the top `top`
    double thresh = 0.9;
    ComboId default_combo = kDefaultCombo; // fallback when validation fails
    std::uint64_t seed = 0;

    void validate() const;
};

// Validation accuracies: one row per voter (k*nr), one column per combo (15),
// columns in combo enumeration order.
using PerformanceTable = Matrix;

// Train a small ridge on `min(f, F_t)` sampled feature columns per
// (voter, combo) cell and score it on the voter's validation rows.
// Column draws are seeded from (cfg.seed, voter, combo); splits come from
// make_splits with (k, nr, mds, cfg.seed).
PerformanceTable evaluate_combos(const FeatureBundle& fb, const std::vector<int>& labels, int num_classes,
                                 const SelectionConfig& cfg, const std::vector<std::string>* class_names = nullptr);

// Combo with the highest median accuracy across voters (even voter count:
// midpoint of the central two). Ties: higher mean, then enumeration order.
ComboId highest_median_vote(const PerformanceTable& table);

struct VoteValidation {
    ComboId final;    // chosen combo if retained, else the default combo
    double consensus; // fraction of voters ranking the chosen combo in their top `top`
    bool retained;
};

// Per voter, the chosen combo is "in" when its score >= that voter's top-th
// best score (ties at the cutoff count as inside). Mean >= thresh retains it.
VoteValidation validate_vote(const PerformanceTable& table, ComboId chosen, const SelectionConfig& cfg);

struct SelectionResult {
    ComboId raw_vote;   // highest-median winner before validation
    ComboId final;      // after vote validation (may be the default combo)
    double consensus;
    bool retained;
    PerformanceTable table;
};

// evaluate_combos + highest_median_vote + validate_vote in one call.
SelectionResult select_features(const FeatureBundle& fb, const std::vector<int>& labels, int num_classes,
                                const SelectionConfig& cfg, const std::vector<std::string>* class_names = nullptr);

} // namespace selfrocket
