// selfrocket command-line tool: fit / predict / inspect single models, run
// benchmark grids over dataset directories, and recompute benchmark summaries.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bench.hpp"
#include "common.hpp"
#include "selfrocket/dataset.hpp"
#include "selfrocket/parallel.hpp"
#include "selfrocket/pipeline.hpp"
#include "selfrocket/version.hpp"

namespace {

using namespace selfrocket;
using nlohmann::json;

char parse_delim(const std::string& s) {
    if (s.empty()) return '\0';
    if (s == "tab" || s == "\\t") return '\t';
    if (s == "comma") return ',';
    if (s.size() == 1) return s[0];
    throw ConfigError("--delimiter must be 'tab', 'comma', or a single character, got '" + s + "'");
}

// Flags shared by fit and benchmark.
struct CommonFlags {
    std::uint64_t seed = 0;
    SelectionConfig cfg;
    std::size_t features = kDefaultNumFeatures;
    bool znorm = false;
    std::string delimiter;
    int jobs = 0;
    std::string default_combo = combo_name(kDefaultCombo);
};

void add_common_flags(CLI::App* c, CommonFlags& s) {
    c->add_option("--seed", s.seed, "Master RNG seed; fixes every random choice downstream")->capture_default_str();
    c->add_option("--features", s.features, "Convolution feature count per representation")->capture_default_str();
    c->add_flag("--znormalize", s.znorm, "Z-normalize each series at load time (recorded in the model)");
    c->add_option("--delimiter", s.delimiter, "Input field delimiter: tab, comma, or one character (default: auto)");
    c->add_option("--jobs,-j", s.jobs, "Worker threads, 0 = all hardware threads")->envname("SELFROCKET_JOBS");
}

void add_selection_flags(CLI::App* c, CommonFlags& s) {
    c->add_option("--k", s.cfg.k, "Folds per cross-validation repeat")->capture_default_str();
    c->add_option("--nr", s.cfg.nr, "Cross-validation repeats (k*nr voters)")->capture_default_str();
    c->add_option("--f", s.cfg.f, "Feature columns sampled per mini-classifier")->capture_default_str();
    c->add_option("--mds", s.cfg.mds, "Dataset size above which splits switch to subsampling")->capture_default_str();
    c->add_option("--top", s.cfg.top, "Vote validation: combo must rank in each voter's top this-many")
        ->capture_default_str();
    c->add_option("--thresh", s.cfg.thresh, "Vote validation: required voter consensus")->capture_default_str();
    c->add_option("--default-combo", s.default_combo, "Fallback combo when consensus is too low")
        ->capture_default_str();
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IOError("cannot open for writing: " + path);
    return out;
}

// --------------------------------------------------------------------- fit

struct FitArgs {
    CommonFlags common;
    std::string train_path, out_path, fixed, report_path, table_path;
};

void write_table_csv(const PerformanceTable& table, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "voter";
    for (int t = 0; t < kNumCombos; ++t) out << ',' << combo_name(combo_at(t));
    out << '\n';
    for (std::size_t v = 0; v < table.n_rows; ++v) {
        out << v;
        for (std::size_t t = 0; t < table.n_cols; ++t) out << ',' << cli::fmt_double(table.at(v, t));
        out << '\n';
    }
    out.flush();
    if (!out) throw IOError("failed writing " + path);
}

int cmd_fit(const FitArgs& a) {
    set_global_jobs(a.common.jobs);
    SelectionConfig cfg = a.common.cfg;
    cfg.default_combo = parse_combo(a.common.default_combo);

    TimeSeriesDataset train = load_dataset(a.train_path, parse_delim(a.common.delimiter));
    if (a.common.znorm) znormalize(train);

    const auto t0 = std::chrono::steady_clock::now();
    FittedModel m = a.fixed.empty() ? fit(train, cfg, a.common.seed, a.common.features)
                                    : fit_fixed(train, parse_combo(a.fixed), cfg, a.common.seed, a.common.features);
    const double fit_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    m.meta.znormalized = a.common.znorm;
    save_model(m, a.out_path);

    std::string table_path;
    if (m.selection_used) {
        table_path = a.table_path.empty() ? a.out_path + ".table.csv" : a.table_path;
        write_table_csv(m.table, table_path);
    }

    json report{{"model", a.out_path},
                {"dataset", m.meta.dataset},
                {"instances", train.n},
                {"series_length", train.length},
                {"classes", m.class_names},
                {"combo", combo_name(m.combo)},
                {"selection_used", m.selection_used},
                {"seed", a.common.seed},
                {"num_features", m.ridge.num_features},
                {"alpha", m.ridge.alpha},
                {"znormalized", m.meta.znormalized},
                {"fit_seconds", fit_seconds},
                {"finished_at", cli::utc_timestamp()}};
    if (m.selection_used) {
        report["raw_vote"] = combo_name(m.raw_vote);
        report["consensus"] = m.consensus;
        report["retained"] = m.retained;
        report["selection_table"] = table_path;
    }
    const std::string report_path = a.report_path.empty() ? a.out_path + ".report.json" : a.report_path;
    {
        std::ofstream out = open_out(report_path);
        out << report.dump(2) << '\n';
        out.flush();
        if (!out) throw IOError("failed writing " + report_path);
    }

    std::cout << "fit " << m.meta.dataset << ": combo=" << combo_name(m.combo);
    if (m.selection_used) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", m.consensus);
        std::cout << " (raw_vote=" << combo_name(m.raw_vote) << ", consensus=" << buf
                  << (m.retained ? ", retained)" : ", fell back)");
    }
    std::cout << " features=" << m.ridge.num_features << " -> " << a.out_path << "\n";
    return 0;
}

// ----------------------------------------------------------------- predict

struct PredictArgs {
    std::string model_path, data_path, out_path, delimiter;
    bool score = false, no_labels = false;
    int jobs = 0;
};

int cmd_predict(const PredictArgs& a) {
    if (a.score && a.no_labels)
        throw ConfigError("--score needs labeled input; drop --no-labels or --score");
    set_global_jobs(a.jobs);
    const FittedModel m = load_model(a.model_path);
    TimeSeriesDataset ds = load_dataset(a.data_path, parse_delim(a.delimiter), !a.no_labels);
    if (m.meta.znormalized) znormalize(ds); // mirror the fit-time preprocessing
    const std::vector<int> preds = predict(m, ds);

    if (!a.out_path.empty()) {
        std::ofstream out = open_out(a.out_path);
        for (int p : preds) out << m.class_names[p] << '\n';
        out.flush();
        if (!out) throw IOError("failed writing " + a.out_path);
    }
    if (a.score) {
        std::size_t hits = 0;
        for (std::size_t i = 0; i < ds.n; ++i)
            if (m.class_names[preds[i]] == ds.class_names[ds.labels[i]]) ++hits;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4f", static_cast<double>(hits) / static_cast<double>(ds.n));
        std::cout << "accuracy: " << buf << "\n";
    } else if (a.out_path.empty()) {
        for (int p : preds) std::cout << m.class_names[p] << '\n';
    }
    return 0;
}

// ----------------------------------------------------------------- inspect

json plan_summary(const TransformPlan& p) {
    return json{{"input_length", p.input_length},
                {"dilations", p.dilations},
                {"features_per_dilation", p.features_per_dilation},
                {"num_features", p.num_features()}};
}

int cmd_inspect(const std::string& model_path) {
    const FittedModel m = load_model(model_path);
    json j{{"format_version", kModelFormatVersion},
           {"library_version", m.meta.library_version},
           {"dataset", m.meta.dataset},
           {"seed", m.meta.seed},
           {"znormalized", m.meta.znormalized},
           {"combo", combo_name(m.combo)},
           {"selection_used", m.selection_used},
           {"num_features", m.ridge.num_features},
           {"num_classes", m.ridge.num_classes},
           {"classes", m.class_names},
           {"alpha", m.ridge.alpha},
           {"cfg",
            json{{"k", m.cfg.k},
                 {"nr", m.cfg.nr},
                 {"f", m.cfg.f},
                 {"mds", m.cfg.mds},
                 {"top", m.cfg.top},
                 {"thresh", m.cfg.thresh},
                 {"default_combo", combo_name(m.cfg.default_combo)}}}};
    if (m.selection_used) {
        j["raw_vote"] = combo_name(m.raw_vote);
        j["consensus"] = m.consensus;
        j["retained"] = m.retained;
        j["table_shape"] = {m.table.n_rows, m.table.n_cols};
    }
    j["base_plan"] = m.base_plan ? plan_summary(*m.base_plan) : json(nullptr);
    j["diff_plan"] = m.diff_plan ? plan_summary(*m.diff_plan) : json(nullptr);
    std::cout << j.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"SelF-Rocket: random-convolution time-series classification with "
                 "input-representation / pooling-operator selection"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kLibraryVersion);

    FitArgs fit_args;
    CLI::App* fit_cmd = app.add_subcommand("fit", "Train a model on a labeled dataset");
    fit_cmd->add_option("train", fit_args.train_path, "Training data (one series per row, label first)")->required();
    fit_cmd->add_option("-o,--out", fit_args.out_path, "Model output path")->required();
    fit_cmd->add_option("--fixed", fit_args.fixed, "Skip selection and train this combo (e.g. PPV, GMP_DIFF)");
    fit_cmd->add_option("--report", fit_args.report_path, "Fit report path (default: <out>.report.json)");
    fit_cmd->add_option("--table", fit_args.table_path, "Selection table CSV path (default: <out>.table.csv)");
    add_common_flags(fit_cmd, fit_args.common);
    add_selection_flags(fit_cmd, fit_args.common);

    PredictArgs predict_args;
    CLI::App* predict_cmd = app.add_subcommand("predict", "Predict labels with a fitted model");
    predict_cmd->add_option("model", predict_args.model_path, "Model file from fit")->required();
    predict_cmd->add_option("data", predict_args.data_path, "Data to classify")->required();
    predict_cmd->add_flag("--score", predict_args.score, "Print accuracy against the labels in the data file");
    predict_cmd->add_flag("--no-labels", predict_args.no_labels, "Input rows are samples only (no label column)");
    predict_cmd->add_option("-o,--out", predict_args.out_path, "Write predicted labels here instead of stdout");
    predict_cmd->add_option("--delimiter", predict_args.delimiter,
                            "Input field delimiter: tab, comma, or one character (default: auto)");
    predict_cmd->add_option("--jobs,-j", predict_args.jobs, "Worker threads, 0 = all hardware threads")
        ->envname("SELFROCKET_JOBS");

    std::string inspect_path;
    CLI::App* inspect_cmd = app.add_subcommand("inspect", "Print a model's metadata as JSON");
    inspect_cmd->add_option("model", inspect_path, "Model file from fit")->required();

    cli::BenchOptions bench;
    CommonFlags bench_common;
    CLI::App* bench_cmd = app.add_subcommand("benchmark", "Fit/predict grids over a dataset directory");
    bench_cmd->add_option("data_dir", bench.data_dir, "Directory holding <name>_TRAIN/<name>_TEST files")->required();
    bench_cmd->add_option("--datasets", bench.datasets, "Dataset names (comma separated)")
        ->required()
        ->delimiter(',');
    bench_cmd
        ->add_option("--variants", bench.variants,
                     "Methods to run: selfrocket, oracle, or a fixed combo name (comma separated)")
        ->delimiter(',')
        ->capture_default_str();
    bench_cmd->add_option("--resamples", bench.resamples, "Resamples per dataset (id 0 = original split)")
        ->capture_default_str();
    bench_cmd->add_option("--out-dir", bench.out_dir, "Output directory for results.csv and summaries")->required();
    bench_cmd->add_flag("--no-timings", bench.no_timings, "Write 0 for timing columns (reproducible output)");
    add_common_flags(bench_cmd, bench_common);
    add_selection_flags(bench_cmd, bench_common);

    std::string sum_results, sum_out_dir;
    CLI::App* sum_cmd = app.add_subcommand("summarize", "Recompute summary files from a results.csv");
    sum_cmd->add_option("results", sum_results, "results.csv written by benchmark")->required();
    sum_cmd->add_option("--out-dir", sum_out_dir, "Output directory for the summary files")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2; // bad invocation
    }

    return cli::guarded([&]() -> int {
        if (fit_cmd->parsed()) return cmd_fit(fit_args);
        if (predict_cmd->parsed()) return cmd_predict(predict_args);
        if (inspect_cmd->parsed()) return cmd_inspect(inspect_path);
        if (bench_cmd->parsed()) {
            set_global_jobs(bench_common.jobs);
            bench.seed = bench_common.seed;
            bench.cfg = bench_common.cfg;
            bench.cfg.default_combo = parse_combo(bench_common.default_combo);
            bench.features = bench_common.features;
            bench.znormalize = bench_common.znorm;
            bench.delimiter = parse_delim(bench_common.delimiter);
            return cli::run_benchmark(bench);
        }
        if (sum_cmd->parsed()) return cli::run_summarize(sum_results, sum_out_dir);
        return 2;
    });
}
