#ifndef LPSIM_GENERATORS_HPP
#define LPSIM_GENERATORS_HPP

#include <cstdint>

#include "lpsim/model.hpp"
#include "lpsim/policies.hpp"

namespace lpsim {

// ---------------------------------------------------------------------------
// Synthetic workloads

/// Zipf rank distribution over the n experts of a layer:
/// p_j proportional to 1/(j+b)^a for rank j in [1, n], normalized to sum to 1.
struct ZipfParams {
    double a = 2.0;  // exponent; larger = more skew
    double b = 0.0;  // shift
    /// When set, each layer maps ranks to experts through its own fixed
    /// seeded permutation, so the hottest expert differs across layers.
    /// Otherwise rank r is expert r in every layer.
    bool per_layer_permutation = false;
};

/// `rounds` full rounds; each position draws its layer's expert independently
/// from the Zipf rank distribution. Deterministic given (params, seed).
LayeredTrace gen_zipf(const ModelShape& shape, const ZipfParams& params, long long rounds,
                      uint64_t seed);

/// Every request uniform over its layer's n experts, independent across
/// positions. The natural hard distribution for caches of size n*l - 1.
LayeredTrace gen_yao_random(const ModelShape& shape, long long rounds, uint64_t seed);

// ---------------------------------------------------------------------------
// Adversarial constructions

/// Cyclic worst case for LRU: n = (k+1)/l experts per layer, so the n*l = k+1
/// pages overflow a size-k cache by exactly one; round i requests expert
/// (i mod n) + 1 in every layer (i counted from 0), so requests cycle through
/// all pages with period n rounds and LRU evicts each page just before it
/// comes around again. Requires l | k+1. The source is unbounded; rounds()
/// materializes any prefix.
struct NemesisTraceSource {
    ModelShape shape;
    CacheSize k;

    LayeredTrace rounds(long long count) const;
};

NemesisTraceSource gen_lru_nemesis(CacheSize k, int num_layers);

/// Worst case for any fixed cache partition: every round requests expert 1 in
/// all layers except layer z, which cycles through its n experts (round i,
/// counted from 1, requests expert (i mod n) + 1 there). Only n+l-1 distinct
/// pages appear, so the full cache serves the tail with no misses at all,
/// while any split giving layer z fewer than n slots keeps missing there.
/// Requires n >= 2, l >= 2, 1 <= z <= l, and n+l-1 <= k < n*l.
LayeredTrace gen_fixed_partition_adversary(const ModelShape& shape, int z, long long rounds,
                                           CacheSize k);

/// Trace built by the adaptive adversary together with the driven policy's
/// own run over it.
struct AdversaryRun {
    LayeredTrace trace;
    SimResult result;
    long long warmup_requests = 0;
    long long adversarial_rounds = 0;
};

/// Adaptive adversary against a deterministic policy at k = n*l - 1: after a
/// warmup of n rounds cycling every page once (round w requests expert w in
/// all layers), the cache holds all pages but one. Each adversarial round
/// then repeats the previous round except in one slot: the layer of the
/// unique non-resident page, which it requests, forcing a miss every round.
/// Throws ConfigError for randomized policies, whose decisions the adversary
/// cannot predict.
AdversaryRun gen_adaptive_adversary(EvictionPolicy& policy, const ModelShape& shape,
                                    long long adversarial_rounds);

// ---------------------------------------------------------------------------
// Parallel coupon collector

struct CoverTimeEstimate {
    int coupons = 0;     // N
    int collectors = 0;  // C
    long long samples = 0;
    double mean = 0.0;    // rounds until the last collector completes
    double stderr_ = 0.0;  // standard error of the mean
};

/// Monte Carlo estimate of E[T(N, C)]: C independent collectors each draw one
/// uniform coupon out of N per round; T is the first round after which every
/// collector holds all N coupons. Collectors that already finished are
/// skipped (their further draws cannot change T).
CoverTimeEstimate coupon_cover_time(int coupons, int collectors, long long samples,
                                    uint64_t seed);

/// H_n = sum_{i=1..n} 1/i.
double harmonic(int n);

}  // namespace lpsim

#endif
