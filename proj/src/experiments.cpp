#include "lpsim/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "lpsim/csv.hpp"
#include "lpsim/errors.hpp"
#include "lpsim/offline.hpp"
#include "lpsim/registry.hpp"

namespace lpsim {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void require_known_policies(const std::vector<std::string>& policies) {
    if (policies.empty()) throw ConfigError("no policies requested");
    const auto& known = all_policy_names();
    for (const std::string& name : policies)
        if (std::find(known.begin(), known.end(), name) == known.end())
            throw ConfigError("unknown strategy '" + name + "'");
}

double fault_ratio(long long numerator, long long denominator) {
    if (denominator == 0)
        return numerator == 0 ? 1.0 : static_cast<double>(numerator);
    return static_cast<double>(numerator) / static_cast<double>(denominator);
}

std::string opt_cell(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

CsvTable timings_table() {
    return CsvTable("lpsim.timings.v1", {"label", "seconds"});
}

}  // namespace

// --- sweep_k -------------------------------------------------------------------

SweepKResult sweep_k(const LayeredTrace& trace, const std::string& trace_id,
                     const SweepKExperiment& experiment) {
    require_known_policies(experiment.policies);
    if (experiment.k_values.empty()) throw ConfigError("no k values requested");
    std::vector<int> ks = experiment.k_values;
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    if (ks.front() < 1) throw ConfigError("cache sizes must be >= 1");

    const bool with_optimum =
        std::find(experiment.policies.begin(), experiment.policies.end(), "opt") !=
        experiment.policies.end();

    // The optimum, when requested, is computed first so every row at the same
    // k can carry a normalized value.
    std::map<int, RunRecord> opt_rows;
    if (with_optimum) {
        for (int k : ks) {
            const auto start = Clock::now();
            const SimResult opt = belady_simulate(trace, CacheSize{k});
            RunRecord row;
            row.trace_id = trace_id;
            row.policy = "opt";
            row.k = k;
            row.faults = opt.faults;
            row.normalized = 1.0;
            row.runtime_seconds = seconds_since(start);
            opt_rows[k] = row;
        }
    }

    SweepKResult result;
    for (const std::string& policy : experiment.policies) {
        long long previous_faults = -1;
        for (int k : ks) {
            RunRecord row;
            if (policy == "opt") {
                row = opt_rows[k];
            } else {
                const auto start = Clock::now();
                const SimResult run =
                    run_policy(policy, trace, CacheSize{k}, experiment.seed);
                row.trace_id = trace_id;
                row.policy = policy;
                row.k = k;
                row.faults = run.faults;
                row.runtime_seconds = seconds_since(start);
                if (with_optimum)
                    row.normalized = fault_ratio(run.faults, opt_rows[k].faults);
            }
            if (previous_faults >= 0 && row.faults > previous_faults) {
                row.increased_from_prev = true;
                result.non_monotone.emplace_back(policy, k);
            }
            previous_faults = row.faults;
            result.rows.push_back(std::move(row));
        }
    }
    return result;
}

void emit_sweep_k(const SweepKResult& result, const std::string& out_dir) {
    ensure_directory(out_dir);
    CsvTable table("lpsim.sweep-k.v1",
                   {"trace", "policy", "k", "faults", "normalized", "increased_from_prev"});
    CsvTable timings = timings_table();
    std::map<std::string, Series> series;  // keyed by policy, insertion-ordered below
    std::vector<std::string> order;
    for (const RunRecord& row : result.rows) {
        table.add_row({row.trace_id, row.policy, std::to_string(row.k),
                       std::to_string(row.faults), opt_cell(row.normalized),
                       row.increased_from_prev ? "1" : "0"});
        timings.add_row({row.trace_id + "/" + row.policy + "/k=" + std::to_string(row.k),
                         format_double(row.runtime_seconds, 3)});
        if (series.find(row.policy) == series.end()) {
            series[row.policy] = Series{row.policy, {}};
            order.push_back(row.policy);
        }
        series[row.policy].points.emplace_back(static_cast<double>(row.k),
                                               static_cast<double>(row.faults));
    }
    table.write_file(out_dir + "/results.csv");
    timings.write_file(out_dir + "/timings.csv");

    std::vector<Series> chart;
    for (const std::string& policy : order) chart.push_back(series[policy]);
    LineChartOptions options;
    options.title = "Faults vs cache size";
    options.x_label = "cache size k";
    options.y_label = "faults";
    write_text_file(out_dir + "/chart.svg", svg_line_chart(options, chart));
}

// --- compare_normalized -----------------------------------------------------------

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw ConfigError("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double clamped = std::clamp(p, 0.0, 1.0);
    const double h = static_cast<double>(values.size() - 1) * clamped;
    const size_t lo = static_cast<size_t>(h);
    if (lo + 1 >= values.size()) return values.back();
    const double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

CompareResult compare_normalized(const std::vector<LayeredTrace>& traces,
                                 const std::vector<std::string>& trace_ids,
                                 const CompareExperiment& experiment) {
    require_known_policies(experiment.policies);
    if (traces.empty()) throw ConfigError("no traces given");
    if (traces.size() != trace_ids.size())
        throw ConfigError("trace/id count mismatch");
    if (experiment.k < 1) throw ConfigError("cache size must be >= 1");

    CompareResult result;
    std::map<std::string, std::vector<double>> normalized_by_policy;
    for (size_t t = 0; t < traces.size(); ++t) {
        const auto opt_start = Clock::now();
        const SimResult opt = belady_simulate(traces[t], CacheSize{experiment.k});
        const double opt_seconds = seconds_since(opt_start);
        for (const std::string& policy : experiment.policies) {
            RunRecord row;
            row.trace_id = trace_ids[t];
            row.policy = policy;
            row.k = experiment.k;
            if (policy == "opt") {
                row.faults = opt.faults;
                row.runtime_seconds = opt_seconds;
            } else {
                const auto start = Clock::now();
                const SimResult run = run_policy(policy, traces[t], CacheSize{experiment.k},
                                                 derive_seed(experiment.seed, t));
                row.faults = run.faults;
                row.runtime_seconds = seconds_since(start);
            }
            row.normalized = fault_ratio(row.faults, opt.faults);
            normalized_by_policy[policy].push_back(*row.normalized);
            result.rows.push_back(std::move(row));
        }
    }
    for (const std::string& policy : experiment.policies) {
        const std::vector<double>& values = normalized_by_policy[policy];
        PolicySummary summary;
        summary.policy = policy;
        summary.min = quantile(values, 0.0);
        summary.q1 = quantile(values, 0.25);
        summary.median = quantile(values, 0.5);
        summary.q3 = quantile(values, 0.75);
        summary.max = quantile(values, 1.0);
        result.summaries.push_back(summary);
    }
    return result;
}

void emit_compare(const CompareResult& result, const std::string& out_dir) {
    ensure_directory(out_dir);
    CsvTable table("lpsim.compare.v1", {"trace", "policy", "k", "faults", "normalized"});
    CsvTable timings = timings_table();
    for (const RunRecord& row : result.rows) {
        table.add_row({row.trace_id, row.policy, std::to_string(row.k),
                       std::to_string(row.faults), opt_cell(row.normalized)});
        timings.add_row({row.trace_id + "/" + row.policy,
                         format_double(row.runtime_seconds, 3)});
    }
    table.write_file(out_dir + "/results.csv");
    timings.write_file(out_dir + "/timings.csv");

    CsvTable summary("lpsim.compare-summary.v1", {"policy", "min", "q1", "median", "q3", "max"});
    std::vector<BoxStats> boxes;
    for (const PolicySummary& s : result.summaries) {
        summary.add_row({s.policy, format_double(s.min), format_double(s.q1),
                         format_double(s.median), format_double(s.q3), format_double(s.max)});
        boxes.push_back(BoxStats{s.policy, s.min, s.q1, s.median, s.q3, s.max});
    }
    summary.write_file(out_dir + "/summary.csv");

    BoxPlotOptions options;
    options.title = "Normalized faults by policy";
    options.y_label = "faults / optimum";
    write_text_file(out_dir + "/boxplot.svg", svg_box_plot(options, boxes));
}

// --- grid_opt_vs_dist ----------------------------------------------------------------

GridResult grid_opt_vs_dist(const GridExperiment& experiment) {
    if (experiment.n_values.empty() || experiment.l_values.empty())
        throw ConfigError("grid axes must be non-empty");
    if (experiment.k < 1) throw ConfigError("cache size must be >= 1");
    if (experiment.rounds < 1) throw ConfigError("round count must be >= 1");

    GridResult result;
    result.experiment = experiment;
    uint64_t cell_index = 0;
    for (int l : experiment.l_values) {
        for (int n : experiment.n_values) {
            GridCell cell;
            cell.n = n;
            cell.l = l;
            const auto start = Clock::now();
            if (experiment.k < l) {
                cell.applicable = false;  // no way to give every layer a slot
            } else {
                const LayeredTrace trace =
                    gen_zipf(ModelShape{n, l}, experiment.zipf, experiment.rounds,
                             derive_seed(experiment.seed, cell_index));
                cell.opt_faults = belady_simulate(trace, CacheSize{experiment.k}).faults;
                cell.opt_dist_faults =
                    opt_dist_simulate(trace, CacheSize{experiment.k}).faults;
                cell.ratio = fault_ratio(cell.opt_dist_faults, cell.opt_faults);
            }
            cell.runtime_seconds = seconds_since(start);
            result.cells.push_back(cell);
            ++cell_index;
        }
    }
    return result;
}

void emit_grid(const GridResult& result, const std::string& out_dir) {
    ensure_directory(out_dir);
    CsvTable table("lpsim.grid-opt-dist.v1",
                   {"n", "l", "k", "applicable", "opt_faults", "opt_dist_faults", "ratio"});
    CsvTable timings = timings_table();
    HeatmapData heatmap;
    for (int n : result.experiment.n_values)
        heatmap.col_labels.push_back(std::to_string(n));
    for (int l : result.experiment.l_values)
        heatmap.row_labels.push_back(std::to_string(l));
    heatmap.values.assign(result.experiment.l_values.size(),
                          std::vector<double>(result.experiment.n_values.size(), 0.0));

    const size_t cols = result.experiment.n_values.size();
    for (size_t i = 0; i < result.cells.size(); ++i) {
        const GridCell& cell = result.cells[i];
        table.add_row({std::to_string(cell.n), std::to_string(cell.l),
                       std::to_string(result.experiment.k),
                       cell.applicable ? "1" : "0",
                       cell.applicable ? std::to_string(cell.opt_faults) : "",
                       cell.applicable ? std::to_string(cell.opt_dist_faults) : "",
                       cell.applicable ? format_double(cell.ratio) : ""});
        timings.add_row({"n=" + std::to_string(cell.n) + ",l=" + std::to_string(cell.l),
                         format_double(cell.runtime_seconds, 3)});
        heatmap.values[i / cols][i % cols] =
            cell.applicable ? cell.ratio : std::nan("");
    }
    table.write_file(out_dir + "/results.csv");
    timings.write_file(out_dir + "/timings.csv");

    HeatmapOptions options;
    options.title =
        "Split-cache optimum penalty, k=" + std::to_string(result.experiment.k);
    options.x_label = "experts per layer (n)";
    options.y_label = "layers (l)";
    write_text_file(out_dir + "/heatmap.svg", svg_heatmap(options, heatmap));
}

// --- sweep_zipf_a -----------------------------------------------------------------------

ZipfASweepResult sweep_zipf_a(const ZipfASweepExperiment& experiment) {
    if (experiment.a_values.empty()) throw ConfigError("no a values requested");
    if (!experiment.shape.valid()) throw ConfigError("invalid model shape");
    if (experiment.k < experiment.shape.num_layers)
        throw ConfigError("split cache needs k >= l");
    if (experiment.rounds < 1) throw ConfigError("round count must be >= 1");

    ZipfASweepResult result;
    result.experiment = experiment;
    uint64_t index = 0;
    for (double a : experiment.a_values) {
        ZipfAPoint point;
        point.a = a;
        const auto start = Clock::now();
        ZipfParams params;
        params.a = a;
        params.b = experiment.b;
        params.per_layer_permutation = experiment.per_layer_permutation;
        const LayeredTrace trace = gen_zipf(experiment.shape, params, experiment.rounds,
                                            derive_seed(experiment.seed, index));
        point.opt_faults = belady_simulate(trace, CacheSize{experiment.k}).faults;
        point.opt_dist_faults = opt_dist_simulate(trace, CacheSize{experiment.k}).faults;
        point.ratio = fault_ratio(point.opt_dist_faults, point.opt_faults);
        point.runtime_seconds = seconds_since(start);
        result.points.push_back(point);
        ++index;
    }
    return result;
}

void emit_sweep_zipf_a(const ZipfASweepResult& result, const std::string& out_dir) {
    ensure_directory(out_dir);
    CsvTable table("lpsim.sweep-zipf-a.v1",
                   {"a", "n", "l", "k", "opt_faults", "opt_dist_faults", "ratio"});
    CsvTable timings = timings_table();
    Series series{"opt-dist / opt", {}};
    for (const ZipfAPoint& point : result.points) {
        table.add_row({format_double(point.a),
                       std::to_string(result.experiment.shape.experts_per_layer),
                       std::to_string(result.experiment.shape.num_layers),
                       std::to_string(result.experiment.k), std::to_string(point.opt_faults),
                       std::to_string(point.opt_dist_faults), format_double(point.ratio)});
        timings.add_row({"a=" + format_double(point.a),
                         format_double(point.runtime_seconds, 3)});
        series.points.emplace_back(point.a, point.ratio);
    }
    table.write_file(out_dir + "/results.csv");
    timings.write_file(out_dir + "/timings.csv");

    LineChartOptions options;
    options.title = "Split-cache optimum penalty vs skew";
    options.x_label = "zipf exponent a (log scale)";
    options.y_label = "opt-dist / opt fault ratio";
    options.log_x = true;
    write_text_file(out_dir + "/chart.svg", svg_line_chart(options, {series}));
}

// --- verify_theory -------------------------------------------------------------------------

bool TheoryReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const TheoryCheck& c) { return c.passed; });
}

double ratio_after_warmup(const SimResult& policy_result, const SimResult& opt_result,
                          long long warmup_requests) {
    const long long policy_faults = policy_result.faults_after(warmup_requests);
    const long long opt_faults = std::max(1ll, opt_result.faults_after(warmup_requests));
    return static_cast<double>(policy_faults) / static_cast<double>(opt_faults);
}

TheoryReport verify_theory(const VerifyOptions& options) {
    TheoryReport report;

    {  // Exhaustive-search optimum agrees with furthest-in-future.
        long long mismatches = 0;
        std::ostringstream details;
        for (long long i = 0; i < options.oracle_traces; ++i) {
            Rng param_rng(derive_seed(options.seed, 1000 + static_cast<uint64_t>(i)));
            const int n = 2 + static_cast<int>(draw_below(param_rng, 2));
            const int l = 1 + static_cast<int>(draw_below(param_rng, 3));
            const long long rounds = 1 + static_cast<long long>(draw_below(param_rng, 5));
            const int k = 1 + static_cast<int>(draw_below(
                                  param_rng, static_cast<uint64_t>(std::min(4, n * l))));
            const LayeredTrace trace = gen_yao_random(
                ModelShape{n, l}, rounds, derive_seed(options.seed, 2000 + static_cast<uint64_t>(i)));
            const long long greedy = belady_simulate(trace, CacheSize{k}).faults;
            const long long exact = dp_opt(trace, CacheSize{k});
            if (greedy != exact) {
                ++mismatches;
                details << "n=" << n << " l=" << l << " k=" << k << " len=" << trace.length()
                        << ": greedy=" << greedy << " exact=" << exact << "; ";
            }
        }
        TheoryCheck check;
        check.name = "opt-oracle";
        check.observed = static_cast<double>(mismatches);
        check.threshold = 0.0;
        check.relation = "==";
        check.passed = mismatches == 0;
        check.details = mismatches == 0
                            ? std::to_string(options.oracle_traces) +
                                  " random instances, greedy == exhaustive optimum on all"
                            : details.str();
        report.checks.push_back(std::move(check));
    }

    {  // Any fixed split is unboundedly worse on the single-cycling-layer trace.
        const ModelShape shape{2, 2};
        const CacheSize k{3};
        const LayeredTrace trace = gen_fixed_partition_adversary(
            shape, 2, options.fixed_partition_rounds, k);
        const SimResult dist = run_policy("lru-dist", trace, k, options.seed);
        const SimResult opt = belady_simulate(trace, k);
        TheoryCheck check;
        check.name = "fixed-partition-unbounded";
        check.observed = fault_ratio(dist.faults, std::max(1ll, opt.faults));
        check.threshold = options.fixed_partition_min_ratio;
        check.relation = ">";
        check.passed = check.observed > check.threshold;
        check.details = "n=2 l=2 z=2 k=3, " + std::to_string(options.fixed_partition_rounds) +
                        " rounds: lru-dist=" + std::to_string(dist.faults) +
                        " opt=" + std::to_string(opt.faults);
        report.checks.push_back(std::move(check));
    }

    {  // Adaptive adversary forces every deterministic policy to ratio k-l+1.
        const ModelShape shape{2, 2};
        const int k = static_cast<int>(shape.total_pages()) - 1;
        LruPolicy lru;
        const AdversaryRun run = gen_adaptive_adversary(lru, shape, options.adaptive_rounds);
        const SimResult opt = belady_simulate(run.trace, CacheSize{k});
        TheoryCheck check;
        check.name = "adaptive-lower-bound";
        check.observed = ratio_after_warmup(run.result, opt, run.warmup_requests);
        check.threshold = 0.9 * (k - shape.num_layers + 1);
        check.relation = ">=";
        check.passed = check.observed >= check.threshold;
        check.details = "lru, n=2 l=2 k=3, " + std::to_string(options.adaptive_rounds) +
                        " adversarial rounds: policy=" +
                        std::to_string(run.result.faults_after(run.warmup_requests)) +
                        " opt=" + std::to_string(opt.faults_after(run.warmup_requests));
        report.checks.push_back(std::move(check));
    }

    {  // The cyclic nemesis forces LRU to a ratio of k.
        const NemesisTraceSource source = gen_lru_nemesis(CacheSize{5}, 2);
        const long long rounds =
            options.nemesis_requests / source.shape.num_layers;
        const LayeredTrace trace = source.rounds(rounds);
        const SimResult lru = run_policy("lru", trace, source.k, options.seed);
        const SimResult opt = belady_simulate(trace, source.k);
        const long long warmup = source.shape.total_pages();
        TheoryCheck check;
        check.name = "lru-nemesis";
        check.observed = ratio_after_warmup(lru, opt, warmup);
        check.threshold = 0.9 * source.k.value;
        check.relation = ">=";
        check.passed = check.observed >= check.threshold;
        check.details = "k=5 l=2, " + std::to_string(trace.length()) +
                        " requests: lru=" + std::to_string(lru.faults_after(warmup)) +
                        " opt=" + std::to_string(opt.faults_after(warmup)) +
                        " (after " + std::to_string(warmup) + "-request warmup)";
        report.checks.push_back(std::move(check));
    }

    {  // Cover-time means dominate the analytical lower bound...
        const int coupon_counts[] = {2, 4, 8};
        const int collector_counts[] = {1, 4, 16, 64};
        double min_margin = std::numeric_limits<double>::infinity();
        std::ostringstream details;
        uint64_t index = 0;
        for (int n : coupon_counts) {
            for (int c : collector_counts) {
                const CoverTimeEstimate estimate = coupon_cover_time(
                    n, c, options.coupon_samples, derive_seed(options.seed, 3000 + index));
                const double bound =
                    std::max(n * harmonic(n), std::log(static_cast<double>(c)) / 6.0);
                // Monte Carlo slack: at C=1 the mean *equals* the bound, so
                // require mean >= bound only up to 4 standard errors.
                const double margin = estimate.mean + 4.0 * estimate.stderr_ - bound;
                min_margin = std::min(min_margin, margin);
                details << "N=" << n << ",C=" << c << ": mean="
                        << format_double(estimate.mean) << " bound=" << format_double(bound)
                        << "; ";
                ++index;
            }
        }
        TheoryCheck check;
        check.name = "coupon-cover-time";
        check.observed = min_margin;
        check.threshold = 0.0;
        check.relation = ">=";
        check.passed = min_margin >= 0.0;
        check.details = details.str();
        report.checks.push_back(std::move(check));
    }

    {  // ...and the classical single-collector expectation N*H_N is matched.
        const CoverTimeEstimate estimate =
            coupon_cover_time(4, 1, options.coupon_samples, derive_seed(options.seed, 4000));
        const double expected = 4 * harmonic(4);  // 25/3
        TheoryCheck check;
        check.name = "coupon-classic-mean";
        check.observed = std::abs(estimate.mean - expected) / expected;
        check.threshold = 0.02;
        check.relation = "<=";
        check.passed = check.observed <= check.threshold;
        check.details = "N=4 C=1: mean=" + format_double(estimate.mean) +
                        " expected=" + format_double(expected);
        report.checks.push_back(std::move(check));
    }

    return report;
}

void emit_verify_report(const TheoryReport& report, const std::string& out_dir) {
    ensure_directory(out_dir);
    nlohmann::json doc;
    doc["schema"] = "lpsim.verify-theory.v1";
    doc["all_passed"] = report.all_passed();
    doc["checks"] = nlohmann::json::array();
    for (const TheoryCheck& check : report.checks) {
        nlohmann::json item;
        item["name"] = check.name;
        item["passed"] = check.passed;
        item["observed"] = check.observed;
        item["threshold"] = check.threshold;
        item["relation"] = check.relation;
        item["details"] = check.details;
        doc["checks"].push_back(item);
    }
    write_text_file(out_dir + "/report.json", doc.dump(2) + "\n");
}

void ensure_directory(const std::string& path) {
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec) throw ConfigError("cannot create output directory '" + path + "': " + ec.message());
}

}  // namespace lpsim
