#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "selfrocket/dataset.hpp"
#include "selfrocket/ridge.hpp"
#include "selfrocket/selection.hpp"
#include "selfrocket/transform.hpp"

namespace selfrocket {

inline constexpr std::size_t kDefaultNumFeatures = 9996;

struct ModelMetadata {
    std::string dataset;
    std::uint64_t seed = 0;
    std::string library_version;
    bool znormalized = false; // input was z-normalized at load time; predict must match
};

// A trained classifier: transform plans for the representations the selected
// combo needs, the ridge trained on that combo's full feature set, and the
// selection evidence that picked it.
struct FittedModel {
    ModelMetadata meta;
    SelectionConfig cfg;
    ComboId combo;                         // what predict computes
    ComboId raw_vote;                      // highest-median winner before validation
    double consensus = -1.0;               // -1 when selection was bypassed
    bool retained = false;                 // vote validation kept the raw vote
    bool selection_used = false;
    std::optional<TransformPlan> base_plan; // present iff a stored rep needs it
    std::optional<TransformPlan> diff_plan;
    RidgeModel ridge;
    PerformanceTable table;                // voters x 15; empty when selection bypassed
    std::vector<std::string> class_names;
};

// Full training pipeline: fit BASE and DIFF plans, build all 15 combo feature
// sets, vote/validate a combo, then train the final ridge on every column of
// the winner. All randomness is derived from `seed` (cfg.seed is ignored here;
// the selection stage gets its own derived stream).
FittedModel fit(const TimeSeriesDataset& train, const SelectionConfig& cfg, std::uint64_t seed,
                std::size_t num_features_target = kDefaultNumFeatures);

// Same pipeline with the selection stage bypassed: train on a caller-chosen
// combo. Plans are derived exactly as in fit() for the same seed, so a fixed
// fit and a selected fit are comparable apples-to-apples.
FittedModel fit_fixed(const TimeSeriesDataset& train, ComboId combo, const SelectionConfig& cfg, std::uint64_t seed,
                      std::size_t num_features_target = kDefaultNumFeatures);

// Predicted class ids. Computes only the selected combo's features (the other
// 14 combos' pooling code never runs).
std::vector<int> predict(const FittedModel& m, const TimeSeriesDataset& ds);

// Upper-bound diagnostic: per-combo test accuracies when each combo gets the
// full final-ridge treatment and the test labels pick the winner. This reads
// the test labels, so it is deliberately NOT a FittedModel and cannot be used
// as one.
struct OracleResult {
    ComboId best;
    std::array<double, kNumCombos> accuracies; // combo enumeration order
};
OracleResult fit_oracle(const TimeSeriesDataset& train, const TimeSeriesDataset& test, std::uint64_t seed,
                        std::size_t num_features_target = kDefaultNumFeatures);

// Versioned, checksummed JSON container. Atomic write (tmp + rename).
// Fixed seed and input give byte-identical files.
void save_model(const FittedModel& m, const std::string& path);

// Throws IOError (missing), IntegrityError (corrupt/truncated/checksum),
// IncompatibilityError (format version mismatch, naming both versions).
FittedModel load_model(const std::string& path);

} // namespace selfrocket
