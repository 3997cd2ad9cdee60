#ifndef LPSIM_EXPERIMENTS_HPP
#define LPSIM_EXPERIMENTS_HPP

#include <optional>
#include <string>
#include <vector>

#include "lpsim/generators.hpp"
#include "lpsim/model.hpp"
#include "lpsim/svg.hpp"

namespace lpsim {

/// One simulated (trace, policy, k) run. `normalized` is faults divided by
/// the offline optimum's faults on the same trace and k, present only when
/// that optimum was actually computed; it is >= 1 by Belady optimality.
struct RunRecord {
    std::string trace_id;
    std::string policy;
    int k = 0;
    long long faults = 0;
    std::optional<double> normalized;
    double runtime_seconds = 0.0;
    bool increased_from_prev = false;  // faults rose versus the next-smaller k
};

// --- Fault counts versus cache size -----------------------------------------

struct SweepKExperiment {
    std::vector<std::string> policies;
    std::vector<int> k_values;
    uint64_t seed = 1;
};

struct SweepKResult {
    std::vector<RunRecord> rows;  // ordered by (policy, k)
    /// (policy, k) pairs where faults increased as k grew: anomalies worth
    /// flagging, since stack-inclusive policies cannot produce them.
    std::vector<std::pair<std::string, int>> non_monotone;
};

SweepKResult sweep_k(const LayeredTrace& trace, const std::string& trace_id,
                     const SweepKExperiment& experiment);
void emit_sweep_k(const SweepKResult& result, const std::string& out_dir);

// --- Normalized fault distribution over a trace suite -----------------------

struct CompareExperiment {
    std::vector<std::string> policies;
    int k = 1;
    uint64_t seed = 1;
};

/// Five-number summary of a policy's normalized faults across traces.
struct PolicySummary {
    std::string policy;
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

struct CompareResult {
    std::vector<RunRecord> rows;
    std::vector<PolicySummary> summaries;
};

CompareResult compare_normalized(const std::vector<LayeredTrace>& traces,
                                 const std::vector<std::string>& trace_ids,
                                 const CompareExperiment& experiment);
void emit_compare(const CompareResult& result, const std::string& out_dir);

/// Linear-interpolation quantile (the common spreadsheet/R-7 rule) of an
/// unsorted sample; p in [0, 1].
double quantile(std::vector<double> values, double p);

// --- Split-cache optimum versus true optimum --------------------------------

struct GridExperiment {
    std::vector<int> n_values = {1, 2, 4, 8, 16, 32};
    std::vector<int> l_values = {1, 2, 4, 8, 16, 32};
    int k = 16;
    ZipfParams zipf;
    long long rounds = 512;
    uint64_t seed = 1;
};

struct GridCell {
    int n = 0, l = 0;
    bool applicable = true;  // false when k < l (no one-slot-per-layer split)
    long long opt_faults = 0;
    long long opt_dist_faults = 0;
    double ratio = 1.0;
    double runtime_seconds = 0.0;
};

struct GridResult {
    GridExperiment experiment;
    std::vector<GridCell> cells;  // row-major over (l, n)
};

GridResult grid_opt_vs_dist(const GridExperiment& experiment);
void emit_grid(const GridResult& result, const std::string& out_dir);

// --- Split-cache penalty versus workload skew --------------------------------

struct ZipfASweepExperiment {
    std::vector<double> a_values = {0.01, 0.05, 0.1, 0.5, 1, 2, 5, 10, 50};
    ModelShape shape{8, 32};
    int k = 64;
    double b = 0.0;
    bool per_layer_permutation = false;
    long long rounds = 1000;
    uint64_t seed = 1;
};

struct ZipfAPoint {
    double a = 0;
    long long opt_faults = 0;
    long long opt_dist_faults = 0;
    double ratio = 1.0;
    double runtime_seconds = 0.0;
};

struct ZipfASweepResult {
    ZipfASweepExperiment experiment;
    std::vector<ZipfAPoint> points;
};

ZipfASweepResult sweep_zipf_a(const ZipfASweepExperiment& experiment);
void emit_sweep_zipf_a(const ZipfASweepResult& result, const std::string& out_dir);

// --- Lower-bound verification -------------------------------------------------

struct VerifyOptions {
    uint64_t seed = 1;
    long long fixed_partition_rounds = 10000;
    double fixed_partition_min_ratio = 50.0;
    long long adaptive_rounds = 2000;
    long long nemesis_requests = 10000;
    long long coupon_samples = 100000;
    long long oracle_traces = 25;
};

struct TheoryCheck {
    std::string name;
    bool passed = false;
    double observed = 0.0;
    double threshold = 0.0;
    std::string relation;  // how observed relates to threshold, e.g. ">="
    std::string details;
};

struct TheoryReport {
    std::vector<TheoryCheck> checks;
    bool all_passed() const;
};

/// Five self-contained checks against the analytical bounds:
///   opt-oracle              exhaustive-search optimum == furthest-in-future
///   fixed-partition-unbounded   split-LRU/OPT ratio blows up on the cyclic
///                                single-layer construction
///   adaptive-lower-bound    adaptive adversary forces ratio >= 0.9*(k-l+1)
///   lru-nemesis             cyclic trace forces LRU/OPT ratio >= 0.9*k
///   coupon-cover-time       Monte Carlo means dominate max(N*H_N, ln(C)/6),
///                           plus the classical N*H_N expectation at C=1
TheoryReport verify_theory(const VerifyOptions& options);
void emit_verify_report(const TheoryReport& report, const std::string& out_dir);

/// Competitive-ratio helper: faults of `policy_result` after the warmup
/// prefix divided by the same for `opt_result` (clamped to >= 1 fault to
/// keep finite ratios when the optimum is perfect after warmup).
double ratio_after_warmup(const SimResult& policy_result, const SimResult& opt_result,
                          long long warmup_requests);

void ensure_directory(const std::string& path);

}  // namespace lpsim

#endif
