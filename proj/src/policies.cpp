#include "lpsim/policies.hpp"

#include <algorithm>

#include "lpsim/errors.hpp"

namespace lpsim {

// --- CacheState -------------------------------------------------------------

CacheState::CacheState(CacheSize capacity, int num_layers)
    : capacity_(capacity.value), layer_counts_(static_cast<size_t>(num_layers), 0) {}

long long CacheState::last_use(PageId page) const {
    auto it = residents_.find(page);
    if (it == residents_.end())
        throw SimulationFault("last_use queried for non-resident page " + page.str());
    return it->second;
}

void CacheState::insert(PageId page, long long t) {
    if (resident(page)) throw SimulationFault("insert of already-resident page " + page.str());
    if (full()) throw SimulationFault("insert into full cache");
    residents_.emplace(page, t);
    layer_counts_[static_cast<size_t>(page.layer - 1)]++;
}

void CacheState::touch(PageId page, long long t) {
    auto it = residents_.find(page);
    if (it == residents_.end()) throw SimulationFault("touch of non-resident page " + page.str());
    it->second = t;
}

void CacheState::evict(PageId page) {
    auto it = residents_.find(page);
    if (it == residents_.end()) throw SimulationFault("evict of non-resident page " + page.str());
    residents_.erase(it);
    layer_counts_[static_cast<size_t>(page.layer - 1)]--;
}

// --- SimResult ---------------------------------------------------------------

long long SimResult::faults_after(long long warmup_requests) const {
    long long count = 0;
    for (long long i = warmup_requests; i < length(); ++i)
        if (!hits[static_cast<size_t>(i)]) ++count;
    return count;
}

// --- Simulation engine --------------------------------------------------------

Simulation::Simulation(EvictionPolicy& policy, const ModelShape& shape, CacheSize k)
    : policy_(policy), shape_(shape), state_(k, shape.num_layers) {
    if (!shape.valid()) throw ConfigError("invalid model shape");
    if (k.value < 1) throw ConfigError("cache size must be at least 1");
    policy_.reset(shape_, k);
    partial_.policy_name = policy_.name();
    partial_.seed = policy_.seed();
}

bool Simulation::step(PageId page) {
    ++clock_;
    state_.set_clock(clock_);

    const bool hit = state_.resident(page);
    if (hit) {
        state_.touch(page, clock_);
        policy_.on_hit(page, clock_);
    } else {
        if (policy_.wants_eviction(state_, page)) {
            scratch_candidates_.clear();
            for (const auto& [resident, tau] : state_.residents())
                scratch_candidates_.push_back(resident);
            PageId victim = policy_.choose_victim(state_, scratch_candidates_, page, clock_);
            if (!state_.resident(victim))
                throw SimulationFault(policy_.name() + " chose non-resident victim " +
                                      victim.str());
            state_.evict(victim);
            policy_.on_evict(victim);
            ++evictions_;
        }
        state_.insert(page, clock_);
        policy_.on_miss(page, clock_);
        ++partial_.faults;
    }

    partial_.hits.push_back(hit);
    const size_t round = static_cast<size_t>(round_of_position(clock_, shape_.num_layers));
    if (partial_.faults_per_round.size() < round) partial_.faults_per_round.resize(round, 0);
    if (!hit) partial_.faults_per_round[round - 1]++;
    return hit;
}

SimResult Simulation::result() const { return partial_; }

SimResult simulate(EvictionPolicy& policy, const LayeredTrace& trace, CacheSize k) {
    ValidationReport report = validate_trace(trace);
    if (!report.ok) throw ConfigError("trace is not a layered request sequence: " + report.describe());
    Simulation sim(policy, trace.shape, k);
    for (PageId page : trace.requests) sim.step(page);
    return sim.result();
}

// --- LRU ----------------------------------------------------------------------

PageId LruPolicy::choose_victim(const CacheState& state, const std::vector<PageId>& candidates,
                                PageId /*incoming*/, long long /*t*/) {
    PageId victim = candidates.front();
    long long oldest = state.last_use(victim);
    for (PageId page : candidates) {
        long long tau = state.last_use(page);
        if (tau < oldest) {
            oldest = tau;
            victim = page;
        }
    }
    return victim;
}

// --- LLRU ----------------------------------------------------------------------

LlruKey llru_indices(PageId page, const CacheState& state, long long t, int num_layers) {
    const long long tau = state.last_use(page);
    LlruKey key;
    key.rounds_since_use = (t - tau) / num_layers;
    key.layer_distance = static_cast<int>(((tau - t) % num_layers + num_layers) % num_layers);
    return key;
}

PageId LlruPolicy::choose_victim(const CacheState& state, const std::vector<PageId>& candidates,
                                 PageId /*incoming*/, long long t) {
    PageId victim = candidates.front();
    long long best_r = -1;
    int best_d = -1;
    for (PageId page : candidates) {
        LlruKey key = llru_indices(page, state, t, num_layers_);
        const int d_eff = key.layer_distance == 0 ? num_layers_ : key.layer_distance;
        if (key.rounds_since_use > best_r ||
            (key.rounds_since_use == best_r && d_eff > best_d)) {
            best_r = key.rounds_since_use;
            best_d = d_eff;
            victim = page;
        }
    }
    return victim;
}

// --- Marking --------------------------------------------------------------------

MarkingPolicy::MarkingPolicy(uint64_t seed) : seed_(seed), rng_(seed) {}

void MarkingPolicy::reset(const ModelShape& /*shape*/, CacheSize /*k*/) {
    rng_.seed(seed_);
    marks_.clear();
}

PageId MarkingPolicy::choose_victim(const CacheState& /*state*/,
                                    const std::vector<PageId>& candidates, PageId /*incoming*/,
                                    long long /*t*/) {
    std::vector<PageId> unmarked;
    for (PageId page : candidates)
        if (marks_.count(page) == 0) unmarked.push_back(page);
    if (unmarked.empty()) {
        // Phase boundary: every resident is marked, so a new phase begins.
        marks_.clear();
        unmarked = candidates;
    }
    return unmarked[draw_below(rng_, unmarked.size())];
}

// --- Dist wrapper -----------------------------------------------------------------

int dist_sub_capacity(CacheSize k, int num_layers, int layer) {
    return k.value / num_layers + (layer <= k.value % num_layers ? 1 : 0);
}

DistPolicy::DistPolicy(std::string inner_name, PolicyFactory inner_factory, uint64_t seed)
    : inner_name_(std::move(inner_name)), inner_factory_(std::move(inner_factory)), seed_(seed) {}

void DistPolicy::reset(const ModelShape& shape, CacheSize k) {
    if (k.value < shape.num_layers)
        throw ConfigError("split cache needs at least one slot per layer (k=" +
                          std::to_string(k.value) + ", l=" + std::to_string(shape.num_layers) +
                          ")");
    sub_capacities_.clear();
    inner_.clear();
    const ModelShape sub_shape{shape.experts_per_layer, 1};
    for (int layer = 1; layer <= shape.num_layers; ++layer) {
        sub_capacities_.push_back(dist_sub_capacity(k, shape.num_layers, layer));
        auto inner = inner_factory_(derive_seed(seed_, static_cast<uint64_t>(layer - 1)));
        inner->reset(sub_shape, CacheSize{sub_capacities_.back()});
        inner_.push_back(std::move(inner));
    }
}

void DistPolicy::on_hit(PageId page, long long t) {
    inner_[static_cast<size_t>(page.layer - 1)]->on_hit(page, t);
}

void DistPolicy::on_miss(PageId page, long long t) {
    inner_[static_cast<size_t>(page.layer - 1)]->on_miss(page, t);
}

void DistPolicy::on_evict(PageId page) {
    inner_[static_cast<size_t>(page.layer - 1)]->on_evict(page);
}

bool DistPolicy::wants_eviction(const CacheState& state, PageId incoming) const {
    return state.layer_count(incoming.layer) >= sub_capacities_[static_cast<size_t>(incoming.layer - 1)];
}

PageId DistPolicy::choose_victim(const CacheState& state, const std::vector<PageId>& candidates,
                                 PageId incoming, long long t) {
    std::vector<PageId> same_layer;
    for (PageId page : candidates)
        if (page.layer == incoming.layer) same_layer.push_back(page);
    if (same_layer.empty())
        throw SimulationFault("split cache has no resident to evict in layer " +
                              std::to_string(incoming.layer));
    return inner_[static_cast<size_t>(incoming.layer - 1)]->choose_victim(state, same_layer,
                                                                          incoming, t);
}

bool DistPolicy::deterministic() const {
    return inner_factory_(0)->deterministic();
}

std::optional<uint64_t> DistPolicy::seed() const {
    if (deterministic()) return std::nullopt;
    return seed_;
}

}  // namespace lpsim
