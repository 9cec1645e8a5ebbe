#pragma once

// Benchmark harness: fit/predict over (dataset, resample, variant) grids,
// long-form results CSV plus derived summary files, and the standalone
// summarize entry point that recomputes those summaries from a results CSV.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "selfrocket/selection.hpp"
#include "selfrocket/types.hpp"

namespace cli {

struct BenchOptions {
    std::string data_dir;
    std::string out_dir;
    std::vector<std::string> datasets;
    std::vector<std::string> variants{"selfrocket"}; // "selfrocket", "oracle", or a combo name
    int resamples = 1;                               // resample 0 is the original split
    std::uint64_t seed = 0;
    selfrocket::SelectionConfig cfg;
    std::size_t features = 9996;
    bool znormalize = false;
    bool no_timings = false; // write 0 for all timing cells (reproducible output)
    char delimiter = '\0';
};

// One results.csv row. Vote fields and per-combo scores are optional: fixed
// combos have neither, oracle has scores (test accuracies) but no vote,
// selfrocket has both (scores are per-combo validation medians).
struct BenchRow {
    std::string dataset;
    long resample = 0;
    std::string variant;
    std::string combo;
    std::string combo_raw;
    double consensus = 0.0;
    bool retained = false;
    bool has_vote = false;
    double accuracy = 0.0;
    double fit_seconds = 0.0;
    double predict_seconds = 0.0;
    std::array<double, selfrocket::kNumCombos> scores{};
    bool has_scores = false;
};

// Runs the grid, writes <out_dir>/results.csv, then re-reads that file and
// derives summary.csv / wdl.csv / combo_histogram.csv from the parsed rows —
// so the summaries are round-trip-stable by construction. Returns 0 when all
// cells succeeded, 1 when any dataset or cell failed (failures are logged to
// stderr and skipped).
int run_benchmark(const BenchOptions& opts);

// Recomputes the summary files from an existing results.csv.
int run_summarize(const std::string& results_path, const std::string& out_dir);

// Exposed for tests.
std::vector<BenchRow> read_results_csv(const std::string& path);
void write_results_csv(const std::vector<BenchRow>& rows, const std::string& path);
void write_summaries(const std::vector<BenchRow>& rows, const std::string& out_dir);

} // namespace cli
