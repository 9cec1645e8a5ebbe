#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "selfrocket/types.hpp"

namespace selfrocket {

// Labeled univariate time-series collection, equal-length, row-major values.
// Labels are dense 0-based ids; class_names keeps the original label tokens
// in id order (first-appearance mapping, so "1"/"2.0"/"cat" all work).
struct TimeSeriesDataset {
    std::string name;
    std::size_t n = 0;      // instances
    std::size_t length = 0; // samples per series
    std::vector<double> values;
    std::vector<int> labels;
    std::vector<std::string> class_names;

    std::span<const double> series(std::size_t i) const { return {values.data() + i * length, length}; }
    std::span<double> series(std::size_t i) { return {values.data() + i * length, length}; }
    int num_classes() const { return static_cast<int>(class_names.size()); }

    // Internal consistency: sizes line up, labels in range, values finite.
    void validate() const;
};

// Parse a delimited text file: one series per row, label in the first field.
// delimiter '\0' means auto-detect from the first non-blank line (tab wins
// over comma). With has_labels=false every field is a sample and all labels
// come back 0 with a single placeholder class name (prediction-only input).
// Throws FormatError / ParseError / EmptyInputError / IOError.
TimeSeriesDataset load_dataset(const std::string& path, char delimiter = '\0', bool has_labels = true);

// Per-series: subtract the mean, divide by the population standard deviation
// floored at 1e-8 (constant series map to all zeros).
void znormalize(TimeSeriesDataset& ds);
void znormalize_series(std::span<double> x);

// Pool train+test and redraw a stratified train/test pair with the original
// sizes and per-class train counts. resample_id 0 returns the original pair
// untouched. Deterministic in (seed, train.name, resample_id).
std::pair<TimeSeriesDataset, TimeSeriesDataset>
stratified_resample(const TimeSeriesDataset& train, const TimeSeriesDataset& test,
                    std::uint32_t resample_id, std::uint64_t seed);

enum class SplitKind {
    kRepeatedStratifiedKFold, // n <= mds: nr independent stratified k-fold shuffles
    kStratifiedShuffle,       // n > mds: k*nr independent stratified subsamples
};

struct SplitSpec {
    SplitKind kind = SplitKind::kRepeatedStratifiedKFold;
    int k = 2;
    int nr = 10;
    int mds = 500; // max dataset size before switching to subsampled splits
    std::uint64_t seed = 0;

    // Picks the kind the n-vs-mds rule dictates.
    static SplitSpec for_size(std::size_t n, int k, int nr, int mds, std::uint64_t seed);
};

struct Split {
    std::vector<std::uint32_t> train;
    std::vector<std::uint32_t> validation;
};

// k*nr (train, validation) index pairs over [0, labels.size()).
// kFold mode: within one repeat the k validation folds partition the range.
// Shuffle mode: train and validation both have exactly floor(mds/2) indices.
// Per-class proportions in every part track the full set within one instance.
// class_names (optional) only improves error messages.
std::vector<Split> make_splits(const std::vector<int>& labels, const SplitSpec& spec,
                               const std::vector<std::string>* class_names = nullptr);

} // namespace selfrocket
