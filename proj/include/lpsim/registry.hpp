#ifndef LPSIM_REGISTRY_HPP
#define LPSIM_REGISTRY_HPP

#include <memory>
#include <string>
#include <vector>

#include "lpsim/policies.hpp"

namespace lpsim {

/// Online policy names accepted by make_policy: lru, llru, marking, and their
/// split-cache variants lru-dist, llru-dist, marking-dist.
const std::vector<std::string>& online_policy_names();

/// All names accepted by run_policy: the online set plus the offline optima
/// "opt" and "opt-dist".
const std::vector<std::string>& all_policy_names();

/// Instantiate an online policy by name. The seed only matters for the
/// randomized ones. Unknown names raise ConfigError listing the valid set.
std::unique_ptr<EvictionPolicy> make_policy(const std::string& name, uint64_t seed);

/// Run any named strategy (online policy or offline optimum) over a trace.
SimResult run_policy(const std::string& name, const LayeredTrace& trace, CacheSize k,
                     uint64_t seed);

}  // namespace lpsim

#endif
