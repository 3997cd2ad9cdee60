#ifndef LPSIM_RNG_HPP
#define LPSIM_RNG_HPP

#include <cstdint>
#include <random>

namespace lpsim {

// All randomness in the project flows through std::mt19937_64, whose output
// sequence is pinned by the standard, plus the two draw helpers below. The
// std::*_distribution adaptors are implementation-defined and deliberately
// avoided, so identical seeds reproduce identical results on any platform.

using Rng = std::mt19937_64;

/// Uniform integer in [0, bound), bound >= 1. Unbiased (rejection sampling).
inline uint64_t draw_below(Rng& rng, uint64_t bound) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double draw_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Derives an independent sub-stream seed from (seed, index); used for
/// per-layer and per-worker streams. splitmix64 finalizer over the pair.
inline uint64_t derive_seed(uint64_t seed, uint64_t index) {
    uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace lpsim

#endif
