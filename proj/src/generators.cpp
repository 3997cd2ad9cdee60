#include "lpsim/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "lpsim/errors.hpp"
#include "lpsim/rng.hpp"

namespace lpsim {

namespace {

void check_shape(const ModelShape& shape) {
    if (!shape.valid()) throw ConfigError("invalid model shape");
}

void check_rounds(long long rounds) {
    if (rounds < 0) throw ConfigError("round count must be non-negative");
}

}  // namespace

// --- Zipf -------------------------------------------------------------------

LayeredTrace gen_zipf(const ModelShape& shape, const ZipfParams& params, long long rounds,
                      uint64_t seed) {
    check_shape(shape);
    check_rounds(rounds);
    if (!(params.a > 0.0)) throw ConfigError("zipf exponent a must be positive");
    if (params.b < 0.0) throw ConfigError("zipf shift b must be non-negative");

    const int n = shape.experts_per_layer;
    const int l = shape.num_layers;

    // Cumulative rank weights; rank j (1-indexed) has weight (j+b)^-a.
    std::vector<double> cumulative(static_cast<size_t>(n));
    double total = 0.0;
    for (int j = 1; j <= n; ++j) {
        total += std::pow(static_cast<double>(j) + params.b, -params.a);
        cumulative[static_cast<size_t>(j - 1)] = total;
    }

    // Rank-to-expert maps, one per layer.
    std::vector<std::vector<int>> expert_of_rank(static_cast<size_t>(l));
    for (int layer = 1; layer <= l; ++layer) {
        auto& map = expert_of_rank[static_cast<size_t>(layer - 1)];
        map.resize(static_cast<size_t>(n));
        std::iota(map.begin(), map.end(), 1);
        if (params.per_layer_permutation) {
            Rng perm_rng(derive_seed(seed, static_cast<uint64_t>(layer)));
            for (size_t i = map.size() - 1; i > 0; --i)
                std::swap(map[i], map[draw_below(perm_rng, i + 1)]);
        }
    }

    Rng rng(seed);
    LayeredTrace trace;
    trace.shape = shape;
    trace.requests.reserve(static_cast<size_t>(rounds * l));
    for (long long r = 0; r < rounds; ++r) {
        for (int layer = 1; layer <= l; ++layer) {
            const double u = draw_unit(rng) * total;
            const size_t rank_idx = static_cast<size_t>(
                std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                cumulative.begin());
            const size_t safe_idx = std::min(rank_idx, static_cast<size_t>(n - 1));
            trace.requests.push_back(
                PageId{layer, expert_of_rank[static_cast<size_t>(layer - 1)][safe_idx]});
        }
    }
    return trace;
}

// --- Uniform random ------------------------------------------------------------

LayeredTrace gen_yao_random(const ModelShape& shape, long long rounds, uint64_t seed) {
    check_shape(shape);
    check_rounds(rounds);
    Rng rng(seed);
    LayeredTrace trace;
    trace.shape = shape;
    trace.requests.reserve(static_cast<size_t>(rounds * shape.num_layers));
    for (long long r = 0; r < rounds; ++r)
        for (int layer = 1; layer <= shape.num_layers; ++layer)
            trace.requests.push_back(PageId{
                layer,
                static_cast<int>(draw_below(rng, static_cast<uint64_t>(shape.experts_per_layer))) +
                    1});
    return trace;
}

// --- LRU nemesis ------------------------------------------------------------------

LayeredTrace NemesisTraceSource::rounds(long long count) const {
    check_rounds(count);
    const int n = shape.experts_per_layer;
    LayeredTrace trace;
    trace.shape = shape;
    trace.requests.reserve(static_cast<size_t>(count * shape.num_layers));
    for (long long i = 0; i < count; ++i) {
        const int expert = static_cast<int>(i % n) + 1;
        for (int layer = 1; layer <= shape.num_layers; ++layer)
            trace.requests.push_back(PageId{layer, expert});
    }
    return trace;
}

NemesisTraceSource gen_lru_nemesis(CacheSize k, int num_layers) {
    if (num_layers < 1) throw ConfigError("layer count must be positive");
    if (k.value < 1) throw ConfigError("cache size must be at least 1");
    if ((k.value + 1) % num_layers != 0)
        throw ConfigError("nemesis construction needs l | k+1 (k=" + std::to_string(k.value) +
                          ", l=" + std::to_string(num_layers) + ")");
    const int n = (k.value + 1) / num_layers;
    return NemesisTraceSource{ModelShape{n, num_layers}, k};
}

// --- Fixed-partition adversary -------------------------------------------------------

LayeredTrace gen_fixed_partition_adversary(const ModelShape& shape, int z, long long rounds,
                                           CacheSize k) {
    check_shape(shape);
    check_rounds(rounds);
    const int n = shape.experts_per_layer;
    const int l = shape.num_layers;
    if (n < 2 || l < 2)
        throw ConfigError("fixed-partition adversary needs n >= 2 and l >= 2");
    if (z < 1 || z > l) throw ConfigError("cycling layer z out of range");
    if (k.value < n + l - 1 || k.value >= n * l)
        throw ConfigError("fixed-partition adversary needs n+l-1 <= k < n*l (k=" +
                          std::to_string(k.value) + ")");

    LayeredTrace trace;
    trace.shape = shape;
    trace.requests.reserve(static_cast<size_t>(rounds * l));
    for (long long i = 1; i <= rounds; ++i) {
        const int cycling_expert = static_cast<int>(i % n) + 1;
        for (int layer = 1; layer <= l; ++layer)
            trace.requests.push_back(PageId{layer, layer == z ? cycling_expert : 1});
    }
    return trace;
}

// --- Adaptive adversary ----------------------------------------------------------------

AdversaryRun gen_adaptive_adversary(EvictionPolicy& policy, const ModelShape& shape,
                                    long long adversarial_rounds) {
    check_shape(shape);
    check_rounds(adversarial_rounds);
    if (!policy.deterministic())
        throw ConfigError("adaptive adversary needs a deterministic policy; " + policy.name() +
                          " is randomized");
    const int n = shape.experts_per_layer;
    const int l = shape.num_layers;
    const CacheSize k{static_cast<int>(shape.total_pages()) - 1};
    if (k.value < 1)
        throw ConfigError("adaptive adversary needs at least two pages (n*l >= 2)");

    Simulation sim(policy, shape, k);
    AdversaryRun run;
    run.trace.shape = shape;
    run.warmup_requests = static_cast<long long>(n) * l;
    run.adversarial_rounds = adversarial_rounds;

    auto request = [&](PageId page) {
        run.trace.requests.push_back(page);
        sim.step(page);
    };

    // Warmup: n rounds cycling every page once; the cache (k = n*l - 1) ends
    // holding all pages but one.
    std::vector<PageId> previous_round(static_cast<size_t>(l));
    for (int w = 1; w <= n; ++w) {
        for (int layer = 1; layer <= l; ++layer) {
            const PageId page{layer, w};
            previous_round[static_cast<size_t>(layer - 1)] = page;
            request(page);
        }
    }

    for (long long round = 0; round < adversarial_rounds; ++round) {
        // The one page absent from the policy's cache, as of the round start.
        PageId missing{0, 0};
        int missing_count = 0;
        for (int layer = 1; layer <= l; ++layer)
            for (int expert = 1; expert <= n; ++expert)
                if (!sim.state().resident(PageId{layer, expert})) {
                    missing = PageId{layer, expert};
                    ++missing_count;
                }
        if (missing_count != 1)
            throw SimulationFault("adaptive adversary expected exactly one absent page, found " +
                                  std::to_string(missing_count));
        previous_round[static_cast<size_t>(missing.layer - 1)] = missing;
        for (int layer = 1; layer <= l; ++layer)
            request(previous_round[static_cast<size_t>(layer - 1)]);
    }

    run.result = sim.result();
    return run;
}

// --- Parallel coupon collector ------------------------------------------------------------

CoverTimeEstimate coupon_cover_time(int coupons, int collectors, long long samples,
                                    uint64_t seed) {
    if (coupons < 1) throw ConfigError("coupon count must be at least 1");
    if (collectors < 1) throw ConfigError("collector count must be at least 1");
    if (samples < 1) throw ConfigError("sample count must be at least 1");

    Rng rng(seed);
    const size_t words = (static_cast<size_t>(coupons) + 63) / 64;
    std::vector<std::vector<uint64_t>> collected(static_cast<size_t>(collectors),
                                                 std::vector<uint64_t>(words));
    std::vector<int> remaining(static_cast<size_t>(collectors));
    std::vector<int> active(static_cast<size_t>(collectors));

    double sum = 0.0;
    double sum_sq = 0.0;
    for (long long s = 0; s < samples; ++s) {
        for (auto& mask : collected) std::fill(mask.begin(), mask.end(), 0);
        std::fill(remaining.begin(), remaining.end(), coupons);
        std::iota(active.begin(), active.end(), 0);

        long long rounds = 0;
        size_t live = active.size();
        while (live > 0) {
            ++rounds;
            for (size_t i = 0; i < live;) {
                const int c = active[i];
                const uint64_t coupon = draw_below(rng, static_cast<uint64_t>(coupons));
                uint64_t& word = collected[static_cast<size_t>(c)][coupon >> 6];
                const uint64_t bit = 1ull << (coupon & 63);
                if (!(word & bit)) {
                    word |= bit;
                    if (--remaining[static_cast<size_t>(c)] == 0) {
                        active[i] = active[--live];
                        continue;  // finished collector swapped out; revisit slot i
                    }
                }
                ++i;
            }
        }
        sum += static_cast<double>(rounds);
        sum_sq += static_cast<double>(rounds) * static_cast<double>(rounds);
    }

    CoverTimeEstimate estimate;
    estimate.coupons = coupons;
    estimate.collectors = collectors;
    estimate.samples = samples;
    estimate.mean = sum / static_cast<double>(samples);
    if (samples > 1) {
        const double var =
            std::max(0.0, (sum_sq - sum * sum / static_cast<double>(samples)) /
                              static_cast<double>(samples - 1));
        estimate.stderr_ = std::sqrt(var / static_cast<double>(samples));
    }
    return estimate;
}

double harmonic(int n) {
    double h = 0.0;
    for (int i = 1; i <= n; ++i) h += 1.0 / i;
    return h;
}

}  // namespace lpsim
