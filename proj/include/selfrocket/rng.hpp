#pragma once

// Deterministic randomness helpers. Everything downstream (splits, resamples,
// feature subsets, bias series draws) must reproduce bit-for-bit across
// platforms and thread counts, so we only use mt19937_64 (bit-specified by the
// standard) and hand-rolled draw primitives; std::shuffle and the std
// distributions are implementation-defined and never touched.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <string_view>
#include <vector>

namespace selfrocket {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t hash_str(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL; // FNV-1a 64
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Independent child stream: mixes the master seed with salt words.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> salts) {
    std::uint64_t st = master ^ 0x6a09e667f3bcc908ULL;
    splitmix64(st);
    for (std::uint64_t s : salts) {
        st ^= s;
        splitmix64(st);
    }
    return splitmix64(st);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    // Unbiased draw in [0, n), n >= 1. Rejection on the top range.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t v;
        do {
            v = eng_();
        } while (v >= limit);
        return v % n;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // In-place Fisher-Yates.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // `count` distinct indices from [0, population), ascending order.
    std::vector<std::uint32_t> sample_without_replacement(std::uint32_t population, std::uint32_t count);

private:
    std::mt19937_64 eng_;
};

inline std::vector<std::uint32_t> Rng::sample_without_replacement(std::uint32_t population, std::uint32_t count) {
    std::vector<std::uint32_t> pool(population);
    for (std::uint32_t i = 0; i < population; ++i) pool[i] = i;
    // Partial Fisher-Yates: settle the first `count` slots only.
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint32_t j = i + static_cast<std::uint32_t>(below(population - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    std::sort(pool.begin(), pool.end());
    return pool;
}

} // namespace selfrocket
