#include "lpsim/offline.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <unordered_map>
#include <vector>

#include "lpsim/errors.hpp"

namespace lpsim {

namespace {

constexpr long long kNever = std::numeric_limits<long long>::max();

/// Index of the next occurrence of requests[i] after i, or kNever.
std::vector<long long> next_occurrence(const std::vector<PageId>& requests) {
    std::vector<long long> next(requests.size(), kNever);
    std::unordered_map<PageId, long long, PageIdHash> upcoming;
    for (long long i = static_cast<long long>(requests.size()) - 1; i >= 0; --i) {
        auto it = upcoming.find(requests[static_cast<size_t>(i)]);
        if (it != upcoming.end()) next[static_cast<size_t>(i)] = it->second;
        upcoming[requests[static_cast<size_t>(i)]] = i;
    }
    return next;
}

/// Furthest-in-future over a plain request vector; returns the hit flags.
/// Ties on "never requested again" fall to the smallest PageId because the
/// resident map iterates in canonical order and the comparison is strict.
std::vector<bool> belady_hits(const std::vector<PageId>& requests, int capacity) {
    const std::vector<long long> next = next_occurrence(requests);
    std::map<PageId, long long> residents;  // page -> index of its next request
    std::vector<bool> hits;
    hits.reserve(requests.size());
    for (size_t i = 0; i < requests.size(); ++i) {
        const PageId page = requests[i];
        auto it = residents.find(page);
        const bool hit = it != residents.end();
        if (hit) {
            it->second = next[i];
        } else {
            if (static_cast<int>(residents.size()) >= capacity) {
                auto victim = residents.begin();
                for (auto cand = residents.begin(); cand != residents.end(); ++cand)
                    if (cand->second > victim->second) victim = cand;
                residents.erase(victim);
            }
            residents.emplace(page, next[i]);
        }
        hits.push_back(hit);
    }
    return hits;
}

std::vector<long long> per_round_faults(const std::vector<bool>& hits, int num_layers) {
    const long long rounds =
        (static_cast<long long>(hits.size()) + num_layers - 1) / num_layers;
    std::vector<long long> faults(static_cast<size_t>(rounds), 0);
    for (size_t i = 0; i < hits.size(); ++i)
        if (!hits[i])
            faults[static_cast<size_t>(round_of_position(static_cast<long long>(i) + 1,
                                                          num_layers) -
                                        1)]++;
    return faults;
}

SimResult result_from_hits(std::string name, std::vector<bool> hits, int num_layers) {
    SimResult result;
    result.policy_name = std::move(name);
    result.faults = 0;
    for (bool h : hits)
        if (!h) ++result.faults;
    result.faults_per_round = per_round_faults(hits, num_layers);
    result.hits = std::move(hits);
    return result;
}

void check_inputs(const LayeredTrace& trace, CacheSize k) {
    if (k.value < 1) throw ConfigError("cache size must be at least 1");
    ValidationReport report = validate_trace(trace);
    if (!report.ok)
        throw ConfigError("trace is not a layered request sequence: " + report.describe());
}

}  // namespace

SimResult belady_simulate(const LayeredTrace& trace, CacheSize k) {
    check_inputs(trace, k);
    return result_from_hits("opt", belady_hits(trace.requests, k.value),
                            trace.shape.num_layers);
}

SimResult opt_dist_simulate(const LayeredTrace& trace, CacheSize k) {
    check_inputs(trace, k);
    const int l = trace.shape.num_layers;
    if (k.value < l)
        throw ConfigError("split cache needs at least one slot per layer (k=" +
                          std::to_string(k.value) + ", l=" + std::to_string(l) + ")");

    std::vector<bool> hits(trace.requests.size(), false);
    for (int layer = 1; layer <= l; ++layer) {
        std::vector<PageId> sub_requests;
        std::vector<size_t> sub_positions;
        for (size_t i = 0; i < trace.requests.size(); ++i) {
            if (trace.requests[i].layer == layer) {
                sub_requests.push_back(trace.requests[i]);
                sub_positions.push_back(i);
            }
        }
        const std::vector<bool> sub_hits =
            belady_hits(sub_requests, dist_sub_capacity(k, l, layer));
        for (size_t j = 0; j < sub_positions.size(); ++j) hits[sub_positions[j]] = sub_hits[j];
    }
    return result_from_hits("opt-dist", std::move(hits), l);
}

long long dp_opt(const LayeredTrace& trace, CacheSize k, OracleCaps caps) {
    check_inputs(trace, k);
    const long long pages = trace.shape.total_pages();
    if (pages > caps.max_pages)
        throw OracleCapExceeded("exact oracle supports at most " +
                                std::to_string(caps.max_pages) + " distinct pages, got " +
                                std::to_string(pages));
    if (trace.length() > caps.max_length)
        throw OracleCapExceeded("exact oracle supports traces up to length " +
                                std::to_string(caps.max_length) + ", got " +
                                std::to_string(trace.length()));

    // Dense page index: page (layer, expert) -> bit (layer-1)*n + (expert-1).
    const int n = trace.shape.experts_per_layer;
    const size_t len = trace.requests.size();
    std::vector<int> request_bit(len);
    for (size_t i = 0; i < len; ++i)
        request_bit[i] =
            (trace.requests[i].layer - 1) * n + (trace.requests[i].expert - 1);

    const uint32_t mask_count = 1u << pages;
    constexpr long long kUnset = -1;
    // memo[pos][mask]: min faults to serve requests[pos..] starting from
    // resident set `mask`.
    std::vector<std::vector<long long>> memo(
        len + 1, std::vector<long long>(mask_count, kUnset));

    std::function<long long(size_t, uint32_t)> solve = [&](size_t pos,
                                                           uint32_t mask) -> long long {
        if (pos == len) return 0;
        long long& slot = memo[pos][mask];
        if (slot != kUnset) return slot;
        const uint32_t bit = 1u << request_bit[pos];
        if (mask & bit) {
            slot = solve(pos + 1, mask);
            return slot;
        }
        long long best;
        if (std::popcount(mask) < k.value) {
            best = solve(pos + 1, mask | bit);
        } else {
            best = std::numeric_limits<long long>::max();
            for (uint32_t victim = mask; victim != 0; victim &= victim - 1) {
                const uint32_t low = victim & (~victim + 1);
                best = std::min(best, solve(pos + 1, (mask & ~low) | bit));
            }
        }
        slot = 1 + best;
        return slot;
    };

    return solve(0, 0);
}

}  // namespace lpsim
