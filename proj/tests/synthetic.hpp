#pragma once

// Constructed datasets with known structure, shared between the unit tests
// and the acceptance suite.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "selfrocket/dataset.hpp"
#include "selfrocket/rng.hpp"

namespace synthetic {

// Spike-amplitude dataset. Every series is low-level noise plus exactly two
// positive spikes whose summed height follows the same distribution in both
// classes (about 6): the low class splits it evenly (two spikes of about 3),
// the high class concentrates it (about 5.4 plus a stub of about 0.6). The
// classes therefore differ only in how the common amplitude budget is
// apportioned, and the per-series maximum is the one clean discriminator.
// Consequences, by design:
//   - max-style pooling of the convolution maps separates cleanly (top
//     response about 6.2 for low vs at least 10.2 for high);
//   - mean-of-positives pooling is blind: both classes have six positive
//     spike responses per map whose sum follows the same distribution;
//   - fraction-above-threshold pooling is blind for almost every feature:
//     below the stub response both classes count six spike positions, and
//     thresholds inside a gap require a bias quantile landing in one of the
//     few order-statistic intervals that cross it (probability ~1/length);
//   - class centroids of the raw series are indistinguishable (spike
//     positions average out), so shape/offset cues carry nothing.
//
// The two spikes are spaced so that no kernel can touch both with its
// positive taps at once: pair distances (and their +-1 neighbours, which
// matter for the differenced representation) avoid every multiple m*d with
// m <= 8 of the dilations {1, 2, 4, 11, 24} that feature plans use at these
// lengths. Without that, two aligned lows (3 + 3) would fake a high (6).
inline selfrocket::TimeSeriesDataset make_spike_dataset(std::size_t n, std::size_t length, std::uint64_t seed,
                                                        const std::string& name = "spike") {
    using selfrocket::Rng;
    selfrocket::TimeSeriesDataset ds;
    ds.name = name;
    ds.n = n;
    ds.length = length;
    ds.class_names = {"low", "high"};
    ds.values.resize(n * length);
    ds.labels.resize(n);
    Rng rng(selfrocket::derive_seed(seed, {selfrocket::hash_str("spike-data")}));
    const double noise_sd = 0.05;
    static constexpr std::size_t kSpacings[] = {18, 26, 30, 35};
    for (std::size_t i = 0; i < n; ++i) {
        const int label = static_cast<int>(i % 2); // alternate so any prefix is balanced
        ds.labels[i] = label;
        auto row = ds.series(i);
        for (double& v : row) {
            // Box-Muller on the portable uniform stream; cheap and good enough.
            const double u1 = rng.uniform01();
            const double u2 = rng.uniform01();
            v = noise_sd * std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(6.283185307179586 * u2);
        }
        const std::size_t gap = kSpacings[rng.below(4)];
        const std::size_t first = 10 + static_cast<std::size_t>(rng.below(length - 20 - gap));
        const double part_a = rng.uniform(2.9, 3.1);
        const double part_b = rng.uniform(2.9, 3.1);
        double h1 = part_a, h2 = part_b;
        if (label == 1) {
            const double stub = rng.uniform(0.5, 0.7);
            h1 = part_a + part_b - stub; // same total, concentrated
            h2 = stub;
        }
        if (rng.below(2) == 0) std::swap(h1, h2); // which spike is the tall one
        row[first] += h1;
        row[first + gap] += h2;
    }
    return ds;
}

// Same instances with the label sequence shuffled into meaninglessness.
inline selfrocket::TimeSeriesDataset shuffle_labels(selfrocket::TimeSeriesDataset ds, std::uint64_t seed) {
    selfrocket::Rng rng(selfrocket::derive_seed(seed, {selfrocket::hash_str("label-shuffle")}));
    rng.shuffle(ds.labels);
    return ds;
}

} // namespace synthetic
