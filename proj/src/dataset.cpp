#include "selfrocket/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "selfrocket/error.hpp"
#include "selfrocket/rng.hpp"

namespace selfrocket {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_fields(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(delim, start);
        if (pos == std::string::npos) {
            out.push_back(trim(std::string_view(line).substr(start)));
            break;
        }
        out.push_back(trim(std::string_view(line).substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

double parse_value(const std::string& field, std::size_t row, std::size_t col) {
    double v = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    if (!field.empty() && field[0] == '+') ++first; // from_chars rejects a leading '+'
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last || field.empty())
        throw ParseError("row " + std::to_string(row) + ", column " + std::to_string(col) +
                         ": cannot parse '" + field + "' as a real number");
    if (!std::isfinite(v))
        throw ParseError("row " + std::to_string(row) + ", column " + std::to_string(col) +
                         ": non-finite value '" + field + "'");
    return v;
}

std::string stem_of(const std::string& path) {
    std::size_t slash = path.find_last_of("/\\");
    std::string base = (slash == std::string::npos) ? path : path.substr(slash + 1);
    const std::size_t dot = base.find_last_of('.');
    if (dot != std::string::npos && dot > 0) base = base.substr(0, dot);
    return base;
}

// Largest-remainder apportionment of `total` slots across classes with
// per-class caps, targets proportional to weight[c]/sum(weight). All the
// comparisons are exact integer arithmetic so results are portable.
std::vector<std::size_t> apportion(const std::vector<std::size_t>& weights,
                                   const std::vector<std::size_t>& caps, std::size_t total) {
    const std::size_t nc = weights.size();
    const std::uint64_t wsum = std::accumulate(weights.begin(), weights.end(), std::uint64_t{0});
    std::vector<std::size_t> out(nc, 0);
    std::vector<std::uint64_t> rem(nc, 0);
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < nc; ++c) {
        const std::uint64_t num = std::uint64_t{total} * weights[c];
        std::size_t base = static_cast<std::size_t>(num / wsum);
        rem[c] = num % wsum;
        base = std::min(base, caps[c]);
        out[c] = base;
        assigned += base;
    }
    // Hand out the leftovers by descending remainder (class id breaks ties),
    // cycling while capacity is left.
    std::vector<std::size_t> order(nc);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
    while (assigned < total) {
        bool moved = false;
        for (std::size_t c : order) {
            if (assigned == total) break;
            if (out[c] < caps[c]) {
                ++out[c];
                ++assigned;
                moved = true;
            }
        }
        if (!moved) throw StratificationError("cannot apportion split quotas: total exceeds capacity");
    }
    return out;
}

std::string class_label(int c, const std::vector<std::string>* names) {
    if (names && c >= 0 && static_cast<std::size_t>(c) < names->size()) return "'" + (*names)[c] + "'";
    return "id " + std::to_string(c);
}

} // namespace

void TimeSeriesDataset::validate() const {
    if (n == 0 || length == 0) throw EmptyInputError("dataset '" + name + "' is empty");
    if (values.size() != n * length)
        throw ShapeError("dataset '" + name + "': value buffer size " + std::to_string(values.size()) +
                         " != n*length = " + std::to_string(n * length));
    if (labels.size() != n)
        throw ShapeError("dataset '" + name + "': " + std::to_string(labels.size()) + " labels for " +
                         std::to_string(n) + " instances");
    for (std::size_t i = 0; i < n; ++i)
        if (labels[i] < 0 || labels[i] >= num_classes())
            throw ShapeError("dataset '" + name + "': label id out of range at instance " + std::to_string(i));
    for (double v : values)
        if (!std::isfinite(v)) throw ParseError("dataset '" + name + "': non-finite value");
}

TimeSeriesDataset load_dataset(const std::string& path, char delimiter, bool has_labels) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IOError("no such file: " + path);

    TimeSeriesDataset ds;
    ds.name = stem_of(path);
    if (!has_labels) ds.class_names.push_back("?");

    std::map<std::string, int> label_ids;
    std::string line;
    std::size_t row = 0;       // 1-based, counts non-blank rows
    std::size_t n_fields = 0;  // fixed by the first row
    const std::size_t skip = has_labels ? 1 : 0;
    char delim = delimiter;

    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        ++row;
        if (delim == '\0') {
            if (line.find('\t') != std::string::npos) delim = '\t';
            else if (line.find(',') != std::string::npos) delim = ',';
            else throw FormatError("cannot detect delimiter on first data row (no tab or comma found)");
        }
        std::vector<std::string> fields = split_fields(line, delim);
        if (row == 1) {
            n_fields = fields.size();
            if (n_fields < skip + 2)
                throw FormatError("row 1 has " + std::to_string(n_fields) + " fields; need at least " +
                                  std::to_string(skip + 2) +
                                  (has_labels ? " (label + two samples)" : " (two samples)"));
            ds.length = n_fields - skip;
        } else if (fields.size() != n_fields) {
            throw FormatError("ragged row " + std::to_string(row) + ": " + std::to_string(fields.size()) +
                              " fields, expected " + std::to_string(n_fields));
        }
        if (has_labels) {
            const std::string& tok = fields[0];
            if (tok.empty()) throw ParseError("row " + std::to_string(row) + ": empty label field");
            auto [it, inserted] = label_ids.try_emplace(tok, static_cast<int>(ds.class_names.size()));
            if (inserted) ds.class_names.push_back(tok);
            ds.labels.push_back(it->second);
        } else {
            ds.labels.push_back(0);
        }
        for (std::size_t c = skip; c < n_fields; ++c) ds.values.push_back(parse_value(fields[c], row, c + 1));
        ++ds.n;
    }
    if (ds.n == 0) throw EmptyInputError("empty input file: " + path);
    return ds;
}

void znormalize_series(std::span<double> x) {
    const double n = static_cast<double>(x.size());
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    const double sd = std::max(std::sqrt(var / n), 1e-8);
    for (double& v : x) v = (v - mean) / sd;
}

void znormalize(TimeSeriesDataset& ds) {
    for (std::size_t i = 0; i < ds.n; ++i) znormalize_series(ds.series(i));
}

std::pair<TimeSeriesDataset, TimeSeriesDataset>
stratified_resample(const TimeSeriesDataset& train, const TimeSeriesDataset& test,
                    std::uint32_t resample_id, std::uint64_t seed) {
    if (train.length != test.length)
        throw ShapeError("resample: train length " + std::to_string(train.length) + " != test length " +
                         std::to_string(test.length));
    if (train.class_names != test.class_names)
        throw ShapeError("resample: train and test class names differ");
    if (resample_id == 0) return {train, test};

    const std::size_t n_tr = train.n, n_te = test.n, total = n_tr + n_te;
    const int nc = train.num_classes();

    auto pooled_label = [&](std::size_t p) { return p < n_tr ? train.labels[p] : test.labels[p - n_tr]; };

    std::vector<std::size_t> quota(nc, 0);
    for (int l : train.labels) ++quota[l];

    std::vector<std::vector<std::size_t>> members(nc);
    for (std::size_t p = 0; p < total; ++p) members[pooled_label(p)].push_back(p);

    Rng rng(derive_seed(seed, {hash_str(train.name), resample_id}));
    std::vector<bool> to_train(total, false);
    for (int c = 0; c < nc; ++c) {
        if (members[c].size() < quota[c])
            throw StratificationError("resample: class " + class_label(c, &train.class_names) + " has " +
                                      std::to_string(members[c].size()) + " pooled instances, fewer than its train quota " +
                                      std::to_string(quota[c]));
        rng.shuffle(members[c]);
        for (std::size_t i = 0; i < quota[c]; ++i) to_train[members[c][i]] = true;
    }

    auto pooled_series = [&](std::size_t p) { return p < n_tr ? train.series(p) : test.series(p - n_tr); };

    TimeSeriesDataset new_tr, new_te;
    new_tr.name = train.name;
    new_te.name = test.name;
    new_tr.length = new_te.length = train.length;
    new_tr.class_names = new_te.class_names = train.class_names;
    for (std::size_t p = 0; p < total; ++p) {
        TimeSeriesDataset& dst = to_train[p] ? new_tr : new_te;
        const auto s = pooled_series(p);
        dst.values.insert(dst.values.end(), s.begin(), s.end());
        dst.labels.push_back(pooled_label(p));
        ++dst.n;
    }
    return {std::move(new_tr), std::move(new_te)};
}

SplitSpec SplitSpec::for_size(std::size_t n, int k, int nr, int mds, std::uint64_t seed) {
    SplitSpec s;
    s.kind = (n <= static_cast<std::size_t>(mds)) ? SplitKind::kRepeatedStratifiedKFold : SplitKind::kStratifiedShuffle;
    s.k = k;
    s.nr = nr;
    s.mds = mds;
    s.seed = seed;
    return s;
}

std::vector<Split> make_splits(const std::vector<int>& labels, const SplitSpec& spec,
                               const std::vector<std::string>* class_names) {
    if (spec.k < 2) throw ConfigError("make_splits: k must be >= 2, got " + std::to_string(spec.k));
    if (spec.nr < 1) throw ConfigError("make_splits: nr must be >= 1, got " + std::to_string(spec.nr));
    if (spec.mds < 2 * spec.k)
        throw ConfigError("make_splits: mds must be >= 2k, got mds=" + std::to_string(spec.mds) +
                          " with k=" + std::to_string(spec.k));
    const std::size_t n = labels.size();
    if (n == 0) throw EmptyInputError("make_splits: no labels");

    const SplitKind expected =
        (n <= static_cast<std::size_t>(spec.mds)) ? SplitKind::kRepeatedStratifiedKFold : SplitKind::kStratifiedShuffle;
    if (spec.kind != expected)
        throw ConfigError("make_splits: spec.kind does not match the n-vs-mds rule (n=" + std::to_string(n) +
                          ", mds=" + std::to_string(spec.mds) + ")");

    int nc = 0;
    for (int l : labels) {
        if (l < 0) throw ShapeError("make_splits: negative label id");
        nc = std::max(nc, l + 1);
    }
    std::vector<std::size_t> counts(nc, 0);
    for (int l : labels) ++counts[l];
    std::vector<std::vector<std::uint32_t>> members(nc);
    for (std::size_t i = 0; i < n; ++i) members[labels[i]].push_back(static_cast<std::uint32_t>(i));

    const int min_per_class = (spec.kind == SplitKind::kRepeatedStratifiedKFold) ? spec.k : 2;
    for (int c = 0; c < nc; ++c)
        if (counts[c] < static_cast<std::size_t>(min_per_class))
            throw StratificationError("class " + class_label(c, class_names) + " has " + std::to_string(counts[c]) +
                                      " instances, fewer than the required " + std::to_string(min_per_class));

    std::vector<Split> out;
    out.reserve(static_cast<std::size_t>(spec.k) * spec.nr);

    if (spec.kind == SplitKind::kRepeatedStratifiedKFold) {
        // Per-fold class allocation: deal the class-sorted label sequence out
        // round-robin, so fold sizes and per-class fold counts differ by <= 1.
        const int k = spec.k;
        std::vector<std::vector<std::size_t>> alloc(k, std::vector<std::size_t>(nc, 0));
        {
            std::vector<int> y_order;
            y_order.reserve(n);
            for (int c = 0; c < nc; ++c) y_order.insert(y_order.end(), counts[c], c);
            for (std::size_t p = 0; p < n; ++p) ++alloc[p % k][y_order[p]];
        }
        for (int r = 0; r < spec.nr; ++r) {
            Rng rng(derive_seed(spec.seed, {hash_str("kfold"), static_cast<std::uint64_t>(r)}));
            std::vector<std::vector<std::uint32_t>> shuffled = members;
            for (auto& m : shuffled) rng.shuffle(m);
            std::vector<std::size_t> cursor(nc, 0);
            for (int j = 0; j < k; ++j) {
                Split sp;
                for (int c = 0; c < nc; ++c)
                    for (std::size_t t = 0; t < alloc[j][c]; ++t) sp.validation.push_back(shuffled[c][cursor[c]++]);
                std::sort(sp.validation.begin(), sp.validation.end());
                std::vector<bool> in_val(n, false);
                for (auto i : sp.validation) in_val[i] = true;
                for (std::uint32_t i = 0; i < n; ++i)
                    if (!in_val[i]) sp.train.push_back(i);
                out.push_back(std::move(sp));
            }
        }
    } else {
        const std::size_t half = static_cast<std::size_t>(spec.mds) / 2;
        const int n_splits = spec.k * spec.nr;
        for (int s = 0; s < n_splits; ++s) {
            Rng rng(derive_seed(spec.seed, {hash_str("shuffle"), static_cast<std::uint64_t>(s)}));
            const std::vector<std::size_t> caps_all = counts;
            const std::vector<std::size_t> tq = apportion(counts, caps_all, half);
            std::vector<std::size_t> caps_left(nc);
            for (int c = 0; c < nc; ++c) caps_left[c] = counts[c] - tq[c];
            const std::vector<std::size_t> vq = apportion(counts, caps_left, half);

            std::vector<std::vector<std::uint32_t>> shuffled = members;
            for (auto& m : shuffled) rng.shuffle(m);
            Split sp;
            for (int c = 0; c < nc; ++c) {
                for (std::size_t i = 0; i < tq[c]; ++i) sp.train.push_back(shuffled[c][i]);
                for (std::size_t i = 0; i < vq[c]; ++i) sp.validation.push_back(shuffled[c][tq[c] + i]);
            }
            std::sort(sp.train.begin(), sp.train.end());
            std::sort(sp.validation.begin(), sp.validation.end());
            out.push_back(std::move(sp));
        }
    }
    return out;
}

} // namespace selfrocket
