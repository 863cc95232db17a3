#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "fairbench/common.hpp"

namespace fairbench {

// All randomness in the toolkit goes through splitmix64 so that results are
// bit-stable across platforms and standard-library versions. Appliers that
// randomize per row key their draws by (seed, row index) instead of consuming
// a shared stream; that keeps predictions row-order independent and lets a
// row be re-predicted (e.g. with the sensitive attribute flipped) under the
// exact same draw.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class DetRng {
public:
    explicit DetRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    // Uniform in [0,1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n). Lemire multiply-shift; n must be > 0.
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Standard normal via Box-Muller.
    double next_normal() {
        double u1 = 1.0 - next_double();  // (0,1]
        double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t state_;
};

// Per-row uniform in [0,1) keyed by (seed, row, salt).
inline double row_uniform(std::uint64_t seed, std::uint64_t row, std::uint64_t salt = 0) {
    std::uint64_t x = splitmix64(seed ^ splitmix64(row ^ splitmix64(salt)));
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

inline std::vector<std::size_t> identity_permutation(std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    return idx;
}

inline void shuffle_indices(std::vector<std::size_t>& idx, DetRng& rng) {
    for (std::size_t i = idx.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(idx[i - 1], idx[j]);
    }
}

// k distinct indices out of [0, n), order randomized, deterministic under rng.
inline std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                           DetRng& rng) {
    if (k > n) throw ParameterError("sample size exceeds population");
    std::vector<std::size_t> idx = identity_permutation(n);
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.next_below(n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
}

}  // namespace fairbench
