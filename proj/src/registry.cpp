#include "lpsim/registry.hpp"

#include <algorithm>

#include "lpsim/errors.hpp"
#include "lpsim/offline.hpp"

namespace lpsim {

namespace {

std::string joined(const std::vector<std::string>& names) {
    std::string out;
    for (const std::string& name : names) {
        if (!out.empty()) out += ", ";
        out += name;
    }
    return out;
}

PolicyFactory base_factory(const std::string& name) {
    if (name == "lru")
        return [](uint64_t) { return std::make_unique<LruPolicy>(); };
    if (name == "llru")
        return [](uint64_t) { return std::make_unique<LlruPolicy>(); };
    if (name == "marking")
        return [](uint64_t seed) { return std::make_unique<MarkingPolicy>(seed); };
    return nullptr;
}

}  // namespace

const std::vector<std::string>& online_policy_names() {
    static const std::vector<std::string> names = {"lru",      "llru",      "marking",
                                                   "lru-dist", "llru-dist", "marking-dist"};
    return names;
}

const std::vector<std::string>& all_policy_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> all = online_policy_names();
        all.push_back("opt");
        all.push_back("opt-dist");
        return all;
    }();
    return names;
}

std::unique_ptr<EvictionPolicy> make_policy(const std::string& name, uint64_t seed) {
    if (PolicyFactory factory = base_factory(name)) return factory(seed);
    const std::string suffix = "-dist";
    if (name.size() > suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
        const std::string inner = name.substr(0, name.size() - suffix.size());
        if (PolicyFactory factory = base_factory(inner))
            return std::make_unique<DistPolicy>(inner, factory, seed);
    }
    throw ConfigError("unknown policy '" + name + "'; known policies: " +
                      joined(online_policy_names()));
}

SimResult run_policy(const std::string& name, const LayeredTrace& trace, CacheSize k,
                     uint64_t seed) {
    if (name == "opt") return belady_simulate(trace, k);
    if (name == "opt-dist") return opt_dist_simulate(trace, k);
    if (std::find(online_policy_names().begin(), online_policy_names().end(), name) ==
        online_policy_names().end())
        throw ConfigError("unknown strategy '" + name + "'; known strategies: " +
                          joined(all_policy_names()));
    auto policy = make_policy(name, seed);
    return simulate(*policy, trace, k);
}

}  // namespace lpsim
