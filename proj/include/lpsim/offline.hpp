#ifndef LPSIM_OFFLINE_HPP
#define LPSIM_OFFLINE_HPP

#include "lpsim/model.hpp"
#include "lpsim/policies.hpp"

namespace lpsim {

/// Offline optimum (furthest-in-future): on a miss with a full cache, evict
/// the resident whose next request lies furthest ahead; residents never
/// requested again rank furthest, ties broken by canonical page order.
/// Result is reported under the policy name "opt".
SimResult belady_simulate(const LayeredTrace& trace, CacheSize k);

/// Offline optimum restricted to static split caches: slots are divided over
/// layers exactly like the online split policies (floor(k/l) per layer plus
/// one remainder slot for the lowest k mod l layers) and each sub-cache runs
/// furthest-in-future on its layer's subsequence independently. Reported as
/// "opt-dist". Requires k >= l.
SimResult opt_dist_simulate(const LayeredTrace& trace, CacheSize k);

/// Search caps for the exact oracle; the state space is
/// length * 2^(n*l) so both bounds are kept small.
struct OracleCaps {
    int max_pages = 9;
    int max_length = 24;
};

/// Exact minimum fault count over all eviction schedules, by memoized search
/// over (position, resident-set) states. Exponential in n*l; throws
/// OracleCapExceeded beyond the caps. Used to certify the furthest-in-future
/// implementation on small instances.
long long dp_opt(const LayeredTrace& trace, CacheSize k, OracleCaps caps = {});

}  // namespace lpsim

#endif
