#include "selfrocket/selection.hpp"

#include <algorithm>
#include <cmath>

#include "selfrocket/error.hpp"
#include "selfrocket/parallel.hpp"
#include "selfrocket/ridge.hpp"
#include "selfrocket/rng.hpp"

namespace selfrocket {

void SelectionConfig::validate() const {
    if (k < 2) throw ConfigError("k must be >= 2, got " + std::to_string(k));
    if (nr < 1) throw ConfigError("nr must be >= 1, got " + std::to_string(nr));
    if (f < 1) throw ConfigError("f must be >= 1, got " + std::to_string(f));
    if (mds < 2 * k) throw ConfigError("mds must be >= 2k, got mds=" + std::to_string(mds) + ", k=" + std::to_string(k));
    if (top < 1 || top > kNumCombos)
        throw ConfigError("top must be in [1, " + std::to_string(kNumCombos) + "], got " + std::to_string(top));
    if (!(thresh > 0.0) || thresh > 1.0) throw ConfigError("thresh must be in (0, 1], got " + std::to_string(thresh));
}

PerformanceTable evaluate_combos(const FeatureBundle& fb, const std::vector<int>& labels, int num_classes,
                                 const SelectionConfig& cfg, const std::vector<std::string>* class_names) {
    cfg.validate();
    const std::size_t n = labels.size();
    if (n == 0) throw EmptyInputError("evaluate_combos: no labels");
    for (int op = 0; op < kNumPoolingOps; ++op)
        if (fb.base[op].n_rows != n || fb.diff[op].n_rows != n)
            throw ShapeError("evaluate_combos: feature matrices have " + std::to_string(fb.base[op].n_rows) +
                             " rows for " + std::to_string(n) + " labels");

    const std::vector<Split> splits =
        make_splits(labels, SplitSpec::for_size(n, cfg.k, cfg.nr, cfg.mds, cfg.seed), class_names);
    const std::size_t voters = splits.size();

    PerformanceTable table(voters, kNumCombos);

    parallel_for(voters * kNumCombos, 0, [&](std::size_t cell) {
        const std::size_t v = cell / kNumCombos;
        const int t = static_cast<int>(cell % kNumCombos);
        const ComboId combo = combo_at(t);
        try {
            const ComboFeatures view = combo_view(fb, combo);
            const std::uint32_t total_cols = static_cast<std::uint32_t>(view.cols());
            const std::uint32_t want = std::min<std::uint32_t>(static_cast<std::uint32_t>(cfg.f), total_cols);

            std::vector<std::uint32_t> cols;
            if (want == total_cols) { // all columns, no sampling randomness
                cols.resize(total_cols);
                for (std::uint32_t c = 0; c < total_cols; ++c) cols[c] = c;
            } else {
                Rng rng(derive_seed(cfg.seed, {hash_str("features"), v, static_cast<std::uint64_t>(t)}));
                cols = rng.sample_without_replacement(total_cols, want);
            }

            const Split& sp = splits[v];
            RowMatrixXd Xtr(sp.train.size(), cols.size());
            view.gather(sp.train, cols, Xtr.data());
            std::vector<int> ytr(sp.train.size());
            for (std::size_t i = 0; i < sp.train.size(); ++i) ytr[i] = labels[sp.train[i]];

            const RidgeModel model = fit_ridge(Xtr, ytr, num_classes);

            RowMatrixXd Xval(sp.validation.size(), cols.size());
            view.gather(sp.validation, cols, Xval.data());
            std::vector<int> yval(sp.validation.size());
            for (std::size_t i = 0; i < sp.validation.size(); ++i) yval[i] = labels[sp.validation[i]];

            table.at(v, t) = accuracy(ridge_predict(model, Xval), yval);
        } catch (const DegenerateLabelsError& e) {
            throw DegenerateLabelsError("voter " + std::to_string(v) + ", combo " + combo_name(combo) + ": " + e.what());
        } catch (const StratificationError& e) {
            throw StratificationError("voter " + std::to_string(v) + ", combo " + combo_name(combo) + ": " + e.what());
        } catch (const Error& e) {
            throw Error("voter " + std::to_string(v) + ", combo " + combo_name(combo) + ": " + e.what());
        }
    });
    return table;
}

ComboId highest_median_vote(const PerformanceTable& table) {
    const std::size_t voters = table.n_rows;
    if (voters == 0 || table.n_cols != kNumCombos) throw ShapeError("highest_median_vote: malformed table");

    int best = 0;
    double best_median = -1.0, best_mean = -1.0;
    std::vector<double> col(voters);
    for (int t = 0; t < kNumCombos; ++t) {
        double mean = 0.0;
        for (std::size_t v = 0; v < voters; ++v) {
            col[v] = table.at(v, t);
            mean += col[v];
        }
        mean /= static_cast<double>(voters);
        std::sort(col.begin(), col.end());
        const double median =
            (voters % 2) ? col[voters / 2] : 0.5 * (col[voters / 2 - 1] + col[voters / 2]);
        // Strict improvement on (median, mean); enumeration order keeps ties.
        if (median > best_median || (median == best_median && mean > best_mean)) {
            best = t;
            best_median = median;
            best_mean = mean;
        }
    }
    return combo_at(best);
}

VoteValidation validate_vote(const PerformanceTable& table, ComboId chosen, const SelectionConfig& cfg) {
    // Only the vote parameters matter here; a degenerate thresh of 0 (always
    // retain) is meaningful for this function even though the full pipeline
    // config requires thresh > 0.
    if (cfg.top < 1 || cfg.top > kNumCombos)
        throw ConfigError("top must be in [1, " + std::to_string(kNumCombos) + "], got " + std::to_string(cfg.top));
    if (cfg.thresh < 0.0 || cfg.thresh > 1.0)
        throw ConfigError("thresh must be in [0, 1], got " + std::to_string(cfg.thresh));
    const std::size_t voters = table.n_rows;
    if (voters == 0 || table.n_cols != kNumCombos) throw ShapeError("validate_vote: malformed table");

    std::size_t inside = 0;
    std::vector<double> row(kNumCombos);
    for (std::size_t v = 0; v < voters; ++v) {
        for (int t = 0; t < kNumCombos; ++t) row[t] = table.at(v, t);
        std::sort(row.begin(), row.end(), std::greater<>());
        const double cutoff = row[cfg.top - 1];
        if (table.at(v, chosen.index()) >= cutoff) ++inside; // ties at the cutoff are inside
    }
    VoteValidation out;
    out.consensus = static_cast<double>(inside) / static_cast<double>(voters);
    out.retained = out.consensus >= cfg.thresh;
    out.final = out.retained ? chosen : cfg.default_combo;
    return out;
}

SelectionResult select_features(const FeatureBundle& fb, const std::vector<int>& labels, int num_classes,
                                const SelectionConfig& cfg, const std::vector<std::string>* class_names) {
    SelectionResult res;
    res.table = evaluate_combos(fb, labels, num_classes, cfg, class_names);
    res.raw_vote = highest_median_vote(res.table);
    const VoteValidation vv = validate_vote(res.table, res.raw_vote, cfg);
    res.final = vv.final;
    res.consensus = vv.consensus;
    res.retained = vv.retained;
    return res;
}

} // namespace selfrocket
