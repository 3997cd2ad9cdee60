#ifndef LPSIM_POLICIES_HPP
#define LPSIM_POLICIES_HPP

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lpsim/model.hpp"
#include "lpsim/rng.hpp"

namespace lpsim {

/// Resident set plus per-page last-use times tau(p). Maintained by the
/// simulation engine; policies read it when choosing victims. Residents are
/// kept in canonical PageId order so that scans are deterministic.
class CacheState {
public:
    CacheState(CacheSize capacity, int num_layers);

    int capacity() const { return capacity_; }
    int size() const { return static_cast<int>(residents_.size()); }
    bool full() const { return size() >= capacity_; }
    bool resident(PageId page) const { return residents_.count(page) != 0; }

    /// Last time `page` was requested; page must be resident.
    long long last_use(PageId page) const;

    int layer_count(int layer) const { return layer_counts_[layer - 1]; }

    /// Current time (1-indexed request counter), set by the engine.
    long long clock() const { return clock_; }
    void set_clock(long long t) { clock_ = t; }

    void insert(PageId page, long long t);
    void touch(PageId page, long long t);
    void evict(PageId page);

    const std::map<PageId, long long>& residents() const { return residents_; }

private:
    int capacity_;
    long long clock_ = 0;
    std::map<PageId, long long> residents_;
    std::vector<int> layer_counts_;
};

/// Eviction policy contract. The engine notifies the policy of every hit,
/// insertion, and eviction; when a miss needs room it asks the policy to
/// choose a victim among `candidates` (all current residents, in canonical
/// order). wants_eviction() lets split-cache policies trigger evictions on
/// sub-cache pressure before the whole cache is full.
class EvictionPolicy {
public:
    virtual ~EvictionPolicy() = default;

    /// Called once by the engine before a run; (re-)binds the policy to the
    /// given shape and capacity and resets all internal state.
    virtual void reset(const ModelShape&, CacheSize) {}

    virtual void on_hit(PageId, long long) {}
    virtual void on_miss(PageId, long long) {}
    virtual void on_evict(PageId) {}

    virtual bool wants_eviction(const CacheState& state, PageId) const {
        return state.full();
    }

    /// Pick the resident to evict so `incoming` can be brought in. Must
    /// return an element of `candidates`.
    virtual PageId choose_victim(const CacheState& state,
                                 const std::vector<PageId>& candidates,
                                 PageId incoming, long long t) = 0;

    virtual std::string name() const = 0;

    /// Whether two runs on the same trace produce the same decisions.
    /// Randomized policies return false and cannot drive adaptive adversaries.
    virtual bool deterministic() const { return true; }

    /// Seed recorded into SimResult, if the policy is randomized.
    virtual std::optional<uint64_t> seed() const { return std::nullopt; }
};

/// Per-request outcome record and aggregate fault counts for one run.
struct SimResult {
    std::string policy_name;
    long long faults = 0;
    std::vector<bool> hits;  // hits[i] == true iff request i+1 was a hit
    std::vector<long long> faults_per_round;
    std::optional<uint64_t> seed;

    long long length() const { return static_cast<long long>(hits.size()); }
    /// Faults at positions strictly after `warmup_requests`.
    long long faults_after(long long warmup_requests) const;
};

/// Step-by-step engine driving one policy over one request stream.
/// Exposed so adversarial generators can co-simulate and inspect the cache.
class Simulation {
public:
    Simulation(EvictionPolicy& policy, const ModelShape& shape, CacheSize k);

    /// Serve one request; returns true on a hit.
    bool step(PageId page);

    const CacheState& state() const { return state_; }
    long long evictions() const { return evictions_; }
    long long clock() const { return clock_; }

    SimResult result() const;

private:
    EvictionPolicy& policy_;
    ModelShape shape_;
    CacheState state_;
    long long clock_ = 0;
    long long evictions_ = 0;
    SimResult partial_;
    std::vector<PageId> scratch_candidates_;
};

/// Run `policy` over the whole trace with a cold cache of size k.
/// The trace must pass validate_trace.
SimResult simulate(EvictionPolicy& policy, const LayeredTrace& trace, CacheSize k);

// ---------------------------------------------------------------------------
// Concrete policies

/// Evict the resident with the smallest last-use time.
class LruPolicy : public EvictionPolicy {
public:
    PageId choose_victim(const CacheState& state, const std::vector<PageId>& candidates,
                         PageId incoming, long long t) override;
    std::string name() const override { return "lru"; }
};

/// Eviction key of the layered LRU rule, for a page with last use tau at
/// time t: R = floor((t - tau) / l) full rounds since the last use, and
/// D = (tau - t) mod l, in [0, l-1].
struct LlruKey {
    long long rounds_since_use = 0;  // R
    int layer_distance = 0;          // D
};

LlruKey llru_indices(PageId page, const CacheState& state, long long t, int num_layers);

/// Layered LRU: evict the page with the largest R; break ties by the largest
/// distance until the page's layer comes up again in the request cycle.
///
/// That distance is D for pages of other layers, but a page belonging to the
/// layer currently being served (D == 0) has the full cycle of l requests
/// ahead of it before it can be requested again, so it ranks as distance l,
/// ahead of every other page with the same R. Ranking it at 0 would protect
/// exactly the pages that are safest to evict.
class LlruPolicy : public EvictionPolicy {
public:
    void reset(const ModelShape& shape, CacheSize) override { num_layers_ = shape.num_layers; }
    PageId choose_victim(const CacheState& state, const std::vector<PageId>& candidates,
                         PageId incoming, long long t) override;
    std::string name() const override { return "llru"; }

private:
    int num_layers_ = 1;
};

/// Phase-based randomized marking: every requested page is marked; a miss
/// with a full cache evicts a uniformly random unmarked resident, unmarking
/// everything first if no unmarked resident is left (phase boundary).
class MarkingPolicy : public EvictionPolicy {
public:
    explicit MarkingPolicy(uint64_t seed);

    void reset(const ModelShape& shape, CacheSize k) override;
    void on_hit(PageId page, long long) override { marks_.insert(page); }
    void on_miss(PageId page, long long) override { marks_.insert(page); }
    void on_evict(PageId page) override { marks_.erase(page); }
    PageId choose_victim(const CacheState& state, const std::vector<PageId>& candidates,
                         PageId incoming, long long t) override;
    std::string name() const override { return "marking"; }
    bool deterministic() const override { return false; }
    std::optional<uint64_t> seed() const override { return seed_; }

private:
    uint64_t seed_;
    Rng rng_;
    std::set<PageId> marks_;
};

using PolicyFactory = std::function<std::unique_ptr<EvictionPolicy>(uint64_t seed)>;

/// Statically splits the cache into one sub-cache per layer and runs an
/// independent instance of the inner policy in each. Sub-cache j gets
/// floor(k/l) slots, plus one of the k mod l remainder slots when j is among
/// layers 1..(k mod l). A page of layer j only ever competes for sub-cache j,
/// so evictions trigger on sub-cache pressure, not global fullness.
/// Requires k >= l.
class DistPolicy : public EvictionPolicy {
public:
    DistPolicy(std::string inner_name, PolicyFactory inner_factory, uint64_t seed);

    void reset(const ModelShape& shape, CacheSize k) override;
    void on_hit(PageId page, long long t) override;
    void on_miss(PageId page, long long t) override;
    void on_evict(PageId page) override;
    bool wants_eviction(const CacheState& state, PageId incoming) const override;
    PageId choose_victim(const CacheState& state, const std::vector<PageId>& candidates,
                         PageId incoming, long long t) override;
    std::string name() const override { return inner_name_ + "-dist"; }
    bool deterministic() const override;
    std::optional<uint64_t> seed() const override;

    int sub_capacity(int layer) const { return sub_capacities_[layer - 1]; }

private:
    std::string inner_name_;
    PolicyFactory inner_factory_;
    uint64_t seed_;
    std::vector<int> sub_capacities_;
    std::vector<std::unique_ptr<EvictionPolicy>> inner_;
};

/// Capacity of sub-cache `layer` (1-indexed) when k slots are split over l
/// layers: floor(k/l) plus one remainder slot for layers 1..(k mod l).
int dist_sub_capacity(CacheSize k, int num_layers, int layer);

}  // namespace lpsim

#endif
