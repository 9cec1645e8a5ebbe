#include "bench.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>

#include "common.hpp"
#include "selfrocket/dataset.hpp"
#include "selfrocket/parallel.hpp"
#include "selfrocket/pipeline.hpp"
#include "selfrocket/ridge.hpp"
#include "selfrocket/rng.hpp"

namespace cli {

namespace fs = std::filesystem;
using namespace selfrocket;

namespace {

// ---------------------------------------------------------------- CSV layer

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

// Splits one CSV record (quotes and doubled quotes handled). The harness
// never writes embedded newlines, so one line is one record.
std::vector<std::string> csv_split(const std::string& line, std::size_t lineno) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    if (quoted) throw FormatError("line " + std::to_string(lineno) + ": unterminated quoted field");
    out.push_back(std::move(cur));
    return out;
}

std::vector<std::string> results_header() {
    std::vector<std::string> h = {"dataset",  "resample", "variant",     "combo",       "combo_raw",
                                  "consensus", "retained", "accuracy",    "fit_seconds", "predict_seconds"};
    for (int t = 0; t < kNumCombos; ++t) h.push_back("score_" + combo_name(combo_at(t)));
    return h;
}

void write_line(std::ofstream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << csv_escape(fields[i]);
    }
    out << '\n';
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IOError("cannot open for writing: " + path);
    return out;
}

// ------------------------------------------------------------- summary math

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// First-appearance orders keep every derived file independent of flag state,
// so summarize can reproduce them from results.csv alone.
std::vector<std::string> appearance_order(const std::vector<BenchRow>& rows, bool variants) {
    std::vector<std::string> order;
    std::set<std::string> seen;
    for (const auto& r : rows) {
        const std::string& key = variants ? r.variant : r.dataset;
        if (seen.insert(key).second) order.push_back(key);
    }
    return order;
}

} // namespace

void write_results_csv(const std::vector<BenchRow>& rows, const std::string& path) {
    std::ofstream out = open_out(path);
    write_line(out, results_header());
    for (const auto& r : rows) {
        std::vector<std::string> f;
        f.reserve(10 + kNumCombos);
        f.push_back(r.dataset);
        f.push_back(std::to_string(r.resample));
        f.push_back(r.variant);
        f.push_back(r.combo);
        f.push_back(r.has_vote ? r.combo_raw : "");
        f.push_back(r.has_vote ? fmt_double(r.consensus) : "");
        f.push_back(r.has_vote ? (r.retained ? "1" : "0") : "");
        f.push_back(fmt_double(r.accuracy));
        f.push_back(fmt_double(r.fit_seconds));
        f.push_back(fmt_double(r.predict_seconds));
        for (int t = 0; t < kNumCombos; ++t) f.push_back(r.has_scores ? fmt_double(r.scores[t]) : "");
        write_line(out, f);
    }
    out.flush();
    if (!out) throw IOError("failed writing " + path);
}

std::vector<BenchRow> read_results_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IOError("no such file: " + path);
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw EmptyInputError("empty results file: " + path);
    ++lineno;
    const auto expected = results_header();
    if (csv_split(line, lineno) != expected)
        throw FormatError(path + ": unexpected header (want dataset,resample,variant,... as written by benchmark)");

    std::vector<BenchRow> rows;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto f = csv_split(line, lineno);
        if (f.size() != expected.size())
            throw FormatError(path + ": line " + std::to_string(lineno) + " has " + std::to_string(f.size()) +
                              " fields, expected " + std::to_string(expected.size()));
        const std::string ctx = path + ": line " + std::to_string(lineno);
        BenchRow r;
        r.dataset = f[0];
        r.resample = parse_long(f[1], ctx);
        r.variant = f[2];
        r.combo = f[3];
        r.combo_raw = f[4];
        r.has_vote = !f[5].empty();
        if (r.has_vote) {
            r.consensus = parse_double(f[5], ctx);
            r.retained = parse_long(f[6], ctx) != 0;
        }
        r.accuracy = parse_double(f[7], ctx);
        r.fit_seconds = parse_double(f[8], ctx);
        r.predict_seconds = parse_double(f[9], ctx);
        r.has_scores = !f[10].empty();
        if (r.has_scores)
            for (int t = 0; t < kNumCombos; ++t) r.scores[t] = parse_double(f[10 + t], ctx);
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_summaries(const std::vector<BenchRow>& rows, const std::string& out_dir) {
    const auto datasets = appearance_order(rows, false);
    const auto variants = appearance_order(rows, true);

    // summary.csv: mean accuracy per (dataset, variant) over its resamples.
    {
        std::ofstream out = open_out((fs::path(out_dir) / "summary.csv").string());
        write_line(out, {"dataset", "variant", "resamples", "mean_accuracy"});
        for (const auto& d : datasets) {
            for (const auto& v : variants) {
                double sum = 0.0;
                long count = 0;
                for (const auto& r : rows)
                    if (r.dataset == d && r.variant == v) {
                        sum += r.accuracy;
                        ++count;
                    }
                if (count == 0) continue;
                write_line(out, {d, v, std::to_string(count), fmt_double(sum / static_cast<double>(count))});
            }
        }
        out.flush();
        if (!out) throw IOError("failed writing summary.csv");
    }

    // wdl.csv: pairwise win/draw/loss on shared (dataset, resample) cells.
    if (variants.size() >= 2) {
        std::map<std::string, std::map<std::pair<std::string, long>, double>> acc;
        for (const auto& r : rows) acc[r.variant][{r.dataset, r.resample}] = r.accuracy;
        std::ofstream out = open_out((fs::path(out_dir) / "wdl.csv").string());
        write_line(out, {"variant_a", "variant_b", "wins_a", "draws", "wins_b"});
        for (std::size_t i = 0; i < variants.size(); ++i) {
            for (std::size_t j = i + 1; j < variants.size(); ++j) {
                long wa = 0, dr = 0, wb = 0;
                const auto& ma = acc[variants[i]];
                const auto& mb = acc[variants[j]];
                for (const auto& [key, a] : ma) {
                    const auto it = mb.find(key);
                    if (it == mb.end()) continue;
                    if (a > it->second) ++wa;
                    else if (a < it->second) ++wb;
                    else ++dr;
                }
                write_line(out, {variants[i], variants[j], std::to_string(wa), std::to_string(dr),
                                 std::to_string(wb)});
            }
        }
        out.flush();
        if (!out) throw IOError("failed writing wdl.csv");
    }

    // combo_histogram.csv: how often each combo was picked, in three cuts —
    // the raw highest-median vote, raw votes whose consensus cleared the
    // threshold, and the final post-validation choice (fallbacks included).
    {
        bool any_vote = false;
        std::array<long, kNumCombos> raw{}, high{}, post{};
        for (const auto& r : rows) {
            if (!r.has_vote) continue;
            any_vote = true;
            raw[parse_combo(r.combo_raw).index()]++;
            if (r.retained) high[parse_combo(r.combo_raw).index()]++;
            post[parse_combo(r.combo).index()]++;
        }
        if (any_vote) {
            std::ofstream out = open_out((fs::path(out_dir) / "combo_histogram.csv").string());
            write_line(out, {"combo", "raw_vote", "high_consensus", "post_validation"});
            for (int t = 0; t < kNumCombos; ++t)
                write_line(out, {combo_name(combo_at(t)), std::to_string(raw[t]), std::to_string(high[t]),
                                 std::to_string(post[t])});
            out.flush();
            if (!out) throw IOError("failed writing combo_histogram.csv");
        }
    }
}

namespace {

// Remap test labels into the training file's class-id space; first-appearance
// order in the two files need not agree.
void align_classes(const TimeSeriesDataset& train, TimeSeriesDataset& test) {
    if (train.class_names == test.class_names) return;
    std::map<std::string, int> ids;
    for (std::size_t c = 0; c < train.class_names.size(); ++c)
        ids[train.class_names[c]] = static_cast<int>(c);
    for (auto& l : test.labels) {
        const std::string& name = test.class_names[l];
        const auto it = ids.find(name);
        if (it == ids.end())
            throw FormatError("test label '" + name + "' never appears in the training file");
        l = it->second;
    }
    test.class_names = train.class_names;
}

struct LoadedDataset {
    TimeSeriesDataset train, test;
};

enum class VariantKind { kSelfRocket, kOracle, kFixed };

VariantKind classify_variant(const std::string& v, ComboId* combo) {
    if (v == "selfrocket") return VariantKind::kSelfRocket;
    if (v == "oracle") return VariantKind::kOracle;
    *combo = parse_combo(v); // throws ConfigError on unknown tokens
    return VariantKind::kFixed;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

int run_benchmark(const BenchOptions& opts) {
    if (opts.datasets.empty()) throw ConfigError("benchmark: no datasets given");
    if (opts.variants.empty()) throw ConfigError("benchmark: no variants given");
    if (opts.resamples < 1) throw ConfigError("benchmark: --resamples must be >= 1");
    {
        std::set<std::string> seen;
        for (const auto& v : opts.variants) {
            ComboId dummy{};
            classify_variant(v, &dummy);
            if (!seen.insert(v).second) throw ConfigError("benchmark: duplicate variant '" + v + "'");
        }
    }
    SelectionConfig cfg = opts.cfg;
    cfg.validate();
    fs::create_directories(opts.out_dir);

    bool any_failed = false;

    // Load every dataset up front; a dataset that fails to load is skipped
    // whole (all its grid cells) and the final exit code goes nonzero.
    std::map<std::string, LoadedDataset> data;
    for (const auto& name : opts.datasets) {
        try {
            LoadedDataset ld;
            ld.train = load_dataset(find_split_file(opts.data_dir, name, "TRAIN"), opts.delimiter);
            ld.test = load_dataset(find_split_file(opts.data_dir, name, "TEST"), opts.delimiter);
            ld.train.name = name;
            ld.test.name = name;
            align_classes(ld.train, ld.test);
            ld.train.validate();
            ld.test.validate();
            if (ld.train.length != ld.test.length)
                throw ShapeError("train length " + std::to_string(ld.train.length) + " != test length " +
                                 std::to_string(ld.test.length));
            if (opts.znormalize) {
                znormalize(ld.train);
                znormalize(ld.test);
            }
            data.emplace(name, std::move(ld));
        } catch (const Error& e) {
            std::cerr << "benchmark: skipping dataset " << name << ": " << e.what() << "\n";
            any_failed = true;
        }
    }

    struct Task {
        const LoadedDataset* ds = nullptr;
        std::string dataset;
        int resample = 0;
        std::string variant;
    };
    std::vector<Task> tasks;
    for (const auto& name : opts.datasets) {
        const auto it = data.find(name);
        if (it == data.end()) continue;
        for (int r = 0; r < opts.resamples; ++r)
            for (const auto& v : opts.variants) tasks.push_back({&it->second, name, r, v});
    }

    std::vector<BenchRow> results(tasks.size());
    std::vector<char> ok(tasks.size(), 0);
    std::vector<std::string> errors(tasks.size());

    parallel_for(tasks.size(), global_jobs(), [&](std::size_t ti) {
        const Task& task = tasks[ti];
        try {
            // The resample and the fit seed depend only on (seed, dataset,
            // resample id): every variant sees the same split and the same
            // transform plans, so cross-variant comparisons are paired.
            auto [rtrain, rtest] = stratified_resample(task.ds->train, task.ds->test,
                                                       static_cast<std::uint32_t>(task.resample), opts.seed);
            const std::uint64_t fit_seed =
                derive_seed(opts.seed, {hash_str("fit"), hash_str(task.dataset),
                                        static_cast<std::uint64_t>(task.resample)});
            BenchRow row;
            row.dataset = task.dataset;
            row.resample = task.resample;
            row.variant = task.variant;

            ComboId fixed{};
            const VariantKind kind = classify_variant(task.variant, &fixed);
            const auto t0 = std::chrono::steady_clock::now();
            if (kind == VariantKind::kOracle) {
                const OracleResult orc = fit_oracle(rtrain, rtest, fit_seed, opts.features);
                row.fit_seconds = seconds_since(t0);
                row.combo = combo_name(orc.best);
                row.accuracy = orc.accuracies[static_cast<std::size_t>(orc.best.index())];
                for (int t = 0; t < kNumCombos; ++t) row.scores[t] = orc.accuracies[t];
                row.has_scores = true;
            } else {
                FittedModel m = (kind == VariantKind::kSelfRocket)
                                    ? fit(rtrain, cfg, fit_seed, opts.features)
                                    : fit_fixed(rtrain, fixed, cfg, fit_seed, opts.features);
                row.fit_seconds = seconds_since(t0);
                const auto t1 = std::chrono::steady_clock::now();
                const std::vector<int> preds = predict(m, rtest);
                row.predict_seconds = seconds_since(t1);
                row.combo = combo_name(m.combo);
                row.accuracy = accuracy(preds, rtest.labels);
                if (kind == VariantKind::kSelfRocket) {
                    row.combo_raw = combo_name(m.raw_vote);
                    row.consensus = m.consensus;
                    row.retained = m.retained;
                    row.has_vote = true;
                    for (int t = 0; t < kNumCombos; ++t) {
                        std::vector<double> col(m.table.n_rows);
                        for (std::size_t v = 0; v < m.table.n_rows; ++v) col[v] = m.table.at(v, t);
                        row.scores[t] = median_of(std::move(col));
                    }
                    row.has_scores = true;
                }
            }
            if (opts.no_timings) row.fit_seconds = row.predict_seconds = 0.0;
            results[ti] = std::move(row);
            ok[ti] = 1;
        } catch (const std::exception& e) {
            errors[ti] = e.what();
        }
    });

    std::vector<BenchRow> rows;
    rows.reserve(tasks.size());
    for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
        if (ok[ti]) {
            rows.push_back(std::move(results[ti]));
        } else {
            std::cerr << "benchmark: " << tasks[ti].dataset << " resample " << tasks[ti].resample << " variant "
                      << tasks[ti].variant << " failed: " << errors[ti] << "\n";
            any_failed = true;
        }
    }

    const std::string results_path = (fs::path(opts.out_dir) / "results.csv").string();
    write_results_csv(rows, results_path);
    // Derive the summaries from the file we just wrote, not from the in-memory
    // rows: whatever survives the CSV round trip is what the summaries see,
    // which pins `summarize` to byte-identical output on the same file.
    write_summaries(read_results_csv(results_path), opts.out_dir);
    return any_failed ? 1 : 0;
}

int run_summarize(const std::string& results_path, const std::string& out_dir) {
    fs::create_directories(out_dir);
    write_summaries(read_results_csv(results_path), out_dir);
    return 0;
}

} // namespace cli
