#include "selfrocket/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "selfrocket/error.hpp"
#include "selfrocket/rng.hpp"

namespace selfrocket {

namespace {

// Golden-ratio conjugate; feature i uses quantile position ((i+1)*phi) mod 1,
// a low-discrepancy sequence that spreads bias quantiles over (0,1).
constexpr double kPhi = 0.618033988749895;

// Linear-interpolation quantile of a sorted array, q in [0,1].
double quantile_sorted(const std::vector<double>& a, double q) {
    const std::size_t n = a.size();
    if (n == 1) return a[0];
    const double pos = q * static_cast<double>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= n) return a[n - 1];
    const double frac = pos - static_cast<double>(lo);
    return a[lo] * (1.0 - frac) + a[lo + 1] * frac;
}

void convolve_into(std::span<const double> x, const Kernel& k, int d, bool padding, std::vector<double>& out) {
    const std::size_t n = x.size();
    if (d < 1) throw ConfigError("dilation must be >= 1, got " + std::to_string(d));
    if (!padding) {
        const std::size_t span = static_cast<std::size_t>(8) * d;
        if (span >= n)
            throw ShapeError("series of length " + std::to_string(n) + " too short for dilation " +
                             std::to_string(d) + " without padding");
        const std::size_t out_n = n - span;
        out.assign(out_n, 0.0);
        for (int j = 0; j < kKernelLength; ++j) {
            const double w = k.weights[j];
            const double* xs = x.data() + static_cast<std::size_t>(j) * d;
            for (std::size_t i = 0; i < out_n; ++i) out[i] += w * xs[i];
        }
    } else {
        out.assign(n, 0.0);
        const std::ptrdiff_t sn = static_cast<std::ptrdiff_t>(n);
        for (int j = 0; j < kKernelLength; ++j) {
            const double w = k.weights[j];
            const std::ptrdiff_t off = static_cast<std::ptrdiff_t>(j - 4) * d;
            const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -off);
            const std::ptrdiff_t hi = sn - std::max<std::ptrdiff_t>(0, off);
            const double* xs = x.data() + off;
            for (std::ptrdiff_t i = lo; i < hi; ++i) out[i] += w * xs[i];
        }
    }
}

std::array<std::atomic<std::uint64_t>, kNumPoolingOps>& counters() {
    static std::array<std::atomic<std::uint64_t>, kNumPoolingOps> c{};
    return c;
}

void bump(PoolingOp op) { counters()[static_cast<int>(op)].fetch_add(1, std::memory_order_relaxed); }

// Shared single-pass core over z - bias. Strictly-positive convention.
PooledValues pool_core(std::span<const double> z, double bias) {
    const std::size_t n = z.size();
    std::size_t pos_count = 0, run = 0, best_run = 0;
    std::uint64_t idx_sum = 0;
    double max_v = -std::numeric_limits<double>::infinity();
    double pos_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = z[i] - bias;
        if (v > max_v) max_v = v;
        if (v > 0.0) {
            ++pos_count;
            pos_sum += v;
            idx_sum += i;
            ++run;
            if (run > best_run) best_run = run;
        } else {
            run = 0;
        }
    }
    PooledValues pv;
    pv.ppv = static_cast<double>(pos_count) / static_cast<double>(n);
    pv.gmp = max_v;
    pv.mpv = pos_count ? pos_sum / static_cast<double>(pos_count) : 0.0;
    pv.mipv = pos_count ? static_cast<double>(idx_sum) / static_cast<double>(pos_count) : -1.0;
    pv.lspv = static_cast<double>(best_run);
    return pv;
}

} // namespace

const std::array<Kernel, kNumKernels>& kernel_bank() {
    static const std::array<Kernel, kNumKernels> bank = [] {
        std::array<Kernel, kNumKernels> ks{};
        int idx = 0;
        for (int a = 0; a < kKernelLength; ++a)
            for (int b = a + 1; b < kKernelLength; ++b)
                for (int c = b + 1; c < kKernelLength; ++c) {
                    Kernel k;
                    k.weights.fill(-1);
                    k.weights[a] = k.weights[b] = k.weights[c] = 2;
                    ks[idx++] = k;
                }
        return ks;
    }();
    return bank;
}

std::vector<double> first_difference(std::span<const double> x) {
    if (x.size() < 2) throw ShapeError("first difference needs at least 2 samples, got " + std::to_string(x.size()));
    std::vector<double> out(x.size() - 1);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) out[i] = x[i + 1] - x[i];
    return out;
}

int TransformPlan::slots_per_kernel() const {
    int b = 0;
    for (int f : features_per_dilation) b += f;
    return b;
}

TransformPlan fit_plan(const TimeSeriesDataset& train, std::size_t num_features_target,
                       Representation rep, std::uint64_t seed) {
    if (rep == Representation::kMix) throw ConfigError("plans are fitted per concrete representation (BASE or DIFF)");
    if (train.n == 0) throw EmptyInputError("fit_plan: empty training set");
    if (num_features_target < static_cast<std::size_t>(kNumKernels))
        throw ConfigError("num_features_target must be >= 84, got " + std::to_string(num_features_target));

    TransformPlan p;
    p.rep = rep;
    p.seed = seed;
    p.input_length = train.length - (rep == Representation::kDiff ? 1 : 0);
    if (p.input_length < 10)
        throw ShapeError("series length " + std::to_string(train.length) + " too short: need >= 10 samples after " +
                         std::string(rep == Representation::kDiff ? "differencing" : "identity"));

    const std::size_t budget = num_features_target / kNumKernels; // slots per kernel
    const double A = std::log2(static_cast<double>(p.input_length - 1) / 8.0);
    const std::size_t m = std::min<std::size_t>(budget, static_cast<std::size_t>(std::floor(A)) + 1);

    p.dilations.reserve(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double e = (m == 1) ? 0.0 : static_cast<double>(j) * A / static_cast<double>(m - 1);
        // +1e-9 absorbs the 1-ulp wobble of exp2(log2(...)) at integer values
        const int d = static_cast<int>(std::floor(std::exp2(e) + 1e-9));
        p.dilations.push_back(std::max(d, 1));
    }
    for (std::size_t j = 1; j < m; ++j)
        if (p.dilations[j] <= p.dilations[j - 1])
            throw Error("internal: dilation grid not strictly increasing"); // exponent step >= 1 forbids this

    // Equal split of the per-kernel slot budget, remainder to the smallest dilations.
    p.features_per_dilation.assign(m, static_cast<int>(budget / m));
    for (std::size_t j = 0; j < budget % m; ++j) ++p.features_per_dilation[j];

    const std::size_t nf = p.num_features();
    p.paddings.assign(nf, 0);
    p.biases.assign(nf, 0.0);

    // Representation applied once up front.
    std::vector<std::vector<double>> repped(train.n);
    for (std::size_t i = 0; i < train.n; ++i) {
        const auto s = train.series(i);
        repped[i] = (rep == Representation::kDiff) ? first_difference(s) : std::vector<double>(s.begin(), s.end());
    }

    std::vector<std::size_t> offset(m, 0); // slot offset of each dilation within a kernel's block
    for (std::size_t j = 1; j < m; ++j) offset[j] = offset[j - 1] + p.features_per_dilation[j - 1];

    Rng rng(seed);
    std::vector<double> map;
    const auto& bank = kernel_bank();
    for (int k = 0; k < kNumKernels; ++k) {
        for (std::size_t di = 0; di < m; ++di) {
            const std::size_t col0 = static_cast<std::size_t>(k) * budget + offset[di];
            const bool pad = ((static_cast<std::size_t>(k) * m + di) % 2) == 0;
            // One uniformly drawn training series provides this group's bias
            // quantiles, taken from its padded activation map.
            const std::size_t pick = rng.below(train.n);
            convolve_into(repped[pick], bank[k], p.dilations[di], /*padding=*/true, map);
            std::vector<double> sorted = map;
            std::sort(sorted.begin(), sorted.end());
            for (int s = 0; s < p.features_per_dilation[di]; ++s) {
                const std::size_t col = col0 + s;
                p.paddings[col] = pad ? 1 : 0;
                const double q = std::fmod(static_cast<double>(col + 1) * kPhi, 1.0);
                p.biases[col] = quantile_sorted(sorted, q);
            }
        }
    }
    return p;
}

std::vector<double> convolve_dilated(std::span<const double> x, const Kernel& k, int dilation, bool padding) {
    std::vector<double> out;
    convolve_into(x, k, dilation, padding, out);
    return out;
}

double PooledValues::get(PoolingOp op) const {
    switch (op) {
    case PoolingOp::kPpv: return ppv;
    case PoolingOp::kGmp: return gmp;
    case PoolingOp::kMpv: return mpv;
    case PoolingOp::kMipv: return mipv;
    case PoolingOp::kLspv: return lspv;
    }
    throw ConfigError("unknown pooling op");
}

PooledValues pool_all(std::span<const double> z, double bias) {
    if (z.empty()) throw ShapeError("pool: empty activation map");
    for (int op = 0; op < kNumPoolingOps; ++op) bump(static_cast<PoolingOp>(op));
    return pool_core(z, bias);
}

double pool_one(std::span<const double> z, double bias, PoolingOp op) {
    if (z.empty()) throw ShapeError("pool: empty activation map");
    bump(op);
    return pool_core(z, bias).get(op);
}

double pool(std::span<const double> z, PoolingOp op) { return pool_one(z, 0.0, op); }

std::array<std::uint64_t, kNumPoolingOps> pooling_op_counts() {
    std::array<std::uint64_t, kNumPoolingOps> out{};
    for (int i = 0; i < kNumPoolingOps; ++i) out[i] = counters()[i].load(std::memory_order_relaxed);
    return out;
}

void reset_pooling_op_counts() {
    for (auto& c : counters()) c.store(0, std::memory_order_relaxed);
}

const Matrix& FeatureBundle::matrix(Representation rep, PoolingOp po) const {
    switch (rep) {
    case Representation::kBase: return base[static_cast<int>(po)];
    case Representation::kDiff: return diff[static_cast<int>(po)];
    case Representation::kMix: break;
    }
    throw ConfigError("MIX has no single backing matrix; use combo_view");
}

ComboFeatures::ComboFeatures(const Matrix* first, const Matrix* second) : first_(first), second_(second) {
    rows_ = first_->n_rows;
    split_ = first_->n_cols;
    cols_ = split_ + (second_ ? second_->n_cols : 0);
    if (second_ && second_->n_rows != rows_) throw ShapeError("combo view: row count mismatch between parts");
}

void ComboFeatures::gather(std::span<const std::uint32_t> rows, std::span<const std::uint32_t> cols,
                           double* out) const {
    for (std::size_t r = 0; r < rows.size(); ++r) {
        double* dst = out + r * cols.size();
        const std::uint32_t src_r = rows[r];
        for (std::size_t c = 0; c < cols.size(); ++c) dst[c] = at(src_r, cols[c]);
    }
}

ComboFeatures combo_view(const FeatureBundle& fb, ComboId id) {
    const int po = static_cast<int>(id.po);
    switch (id.rep) {
    case Representation::kBase: return ComboFeatures(&fb.base[po], nullptr);
    case Representation::kDiff: return ComboFeatures(&fb.diff[po], nullptr);
    case Representation::kMix: return ComboFeatures(&fb.base[po], &fb.diff[po]);
    }
    throw ConfigError("unknown representation");
}

namespace {

void check_plan(const TimeSeriesDataset& ds, const TransformPlan& p, Representation expect) {
    if (p.rep != expect) throw ConfigError("plan has the wrong representation");
    if (p.raw_length() != ds.length)
        throw ShapeError("series length " + std::to_string(ds.length) + " does not match plan (expects " +
                         std::to_string(p.raw_length()) + ")");
    if (p.biases.size() != p.num_features() || p.paddings.size() != p.num_features())
        throw ShapeError("plan bias/padding arrays do not match its feature count");
}

// Pooled features of one repped series under one plan, written through `sink`
// as sink(op, column, value). `ops` selects which operators run.
template <typename Sink>
void series_features(std::span<const double> x, const TransformPlan& p,
                     const std::array<bool, kNumPoolingOps>& ops, bool all_ops, Sink&& sink) {
    const auto& bank = kernel_bank();
    const std::size_t m = p.dilations.size();
    const std::size_t budget = static_cast<std::size_t>(p.slots_per_kernel());
    std::vector<std::size_t> offset(m, 0);
    for (std::size_t j = 1; j < m; ++j) offset[j] = offset[j - 1] + p.features_per_dilation[j - 1];

    std::vector<double> map;
    for (int k = 0; k < kNumKernels; ++k) {
        for (std::size_t di = 0; di < m; ++di) {
            const std::size_t col0 = static_cast<std::size_t>(k) * budget + offset[di];
            const bool pad = p.paddings[col0] != 0;
            convolve_into(x, bank[k], p.dilations[di], pad, map);
            for (int s = 0; s < p.features_per_dilation[di]; ++s) {
                const std::size_t col = col0 + s;
                if (all_ops) {
                    const PooledValues pv = pool_all(map, p.biases[col]);
                    for (int op = 0; op < kNumPoolingOps; ++op) sink(op, col, pv.get(static_cast<PoolingOp>(op)));
                } else {
                    for (int op = 0; op < kNumPoolingOps; ++op)
                        if (ops[op]) sink(op, col, pool_one(map, p.biases[col], static_cast<PoolingOp>(op)));
                }
            }
        }
    }
}

} // namespace

FeatureBundle transform(const TimeSeriesDataset& ds, const TransformPlan& base_plan, const TransformPlan& diff_plan) {
    check_plan(ds, base_plan, Representation::kBase);
    check_plan(ds, diff_plan, Representation::kDiff);
    if (ds.n == 0) throw EmptyInputError("transform: empty dataset");

    FeatureBundle fb;
    for (int op = 0; op < kNumPoolingOps; ++op) {
        fb.base[op].resize(ds.n, base_plan.num_features());
        fb.diff[op].resize(ds.n, diff_plan.num_features());
    }
    const std::array<bool, kNumPoolingOps> all{true, true, true, true, true};
    for (std::size_t i = 0; i < ds.n; ++i) {
        const auto x = ds.series(i);
        series_features(x, base_plan, all, /*all_ops=*/true,
                        [&](int op, std::size_t col, double v) { fb.base[op].at(i, col) = v; });
        const std::vector<double> xd = first_difference(x);
        series_features(xd, diff_plan, all, /*all_ops=*/true,
                        [&](int op, std::size_t col, double v) { fb.diff[op].at(i, col) = v; });
    }
    return fb;
}

Matrix transform_single(const TimeSeriesDataset& ds, ComboId id, const TransformPlan* base_plan,
                        const TransformPlan* diff_plan) {
    const bool want_base = id.rep == Representation::kBase || id.rep == Representation::kMix;
    const bool want_diff = id.rep == Representation::kDiff || id.rep == Representation::kMix;
    if (want_base && !base_plan) throw ConfigError("transform_single: combo needs a BASE plan");
    if (want_diff && !diff_plan) throw ConfigError("transform_single: combo needs a DIFF plan");
    if (want_base) check_plan(ds, *base_plan, Representation::kBase);
    if (want_diff) check_plan(ds, *diff_plan, Representation::kDiff);
    if (ds.n == 0) throw EmptyInputError("transform_single: empty dataset");

    const std::size_t fb = want_base ? base_plan->num_features() : 0;
    const std::size_t fd = want_diff ? diff_plan->num_features() : 0;
    Matrix out(ds.n, fb + fd);

    std::array<bool, kNumPoolingOps> ops{};
    ops[static_cast<int>(id.po)] = true;
    for (std::size_t i = 0; i < ds.n; ++i) {
        const auto x = ds.series(i);
        double* row = out.row(i).data();
        if (want_base)
            series_features(x, *base_plan, ops, /*all_ops=*/false,
                            [&](int, std::size_t col, double v) { row[col] = v; });
        if (want_diff) {
            const std::vector<double> xd = first_difference(x);
            series_features(xd, *diff_plan, ops, /*all_ops=*/false,
                            [&](int, std::size_t col, double v) { row[fb + col] = v; });
        }
    }
    return out;
}

} // namespace selfrocket
