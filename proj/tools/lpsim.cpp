// Command-line harness for the layered paging simulator: trace generation,
// validation, MoE-trace ingestion, policy simulation, and the experiment
// suites (k-sweeps, normalized comparisons, split-cache grids, skew sweeps,
// lower-bound verification).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lpsim/config.hpp"
#include "lpsim/csv.hpp"
#include "lpsim/errors.hpp"
#include "lpsim/experiments.hpp"
#include "lpsim/generators.hpp"
#include "lpsim/ingest.hpp"
#include "lpsim/offline.hpp"
#include "lpsim/registry.hpp"
#include "lpsim/trace_io.hpp"

namespace {

using namespace lpsim;

std::string join(const std::vector<std::string>& items, const std::string& sep = ",") {
    std::string out;
    for (const std::string& item : items) {
        if (!out.empty()) out += sep;
        out += item;
    }
    return out;
}

std::vector<std::string> split_names(const std::string& joined) {
    std::vector<std::string> out;
    std::string current;
    for (char c : joined) {
        if (c == ',' || c == ' ') {
            if (!current.empty()) out.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    if (!current.empty()) out.push_back(current);
    return out;
}

std::string trace_stem(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

void echo_config(const KeyValueConfig& config, const std::string& out_dir) {
    ensure_directory(out_dir);
    write_text_file(out_dir + "/config.echo", config.echo());
}

std::vector<int> to_int_vector(const std::vector<long long>& values, const char* what) {
    std::vector<int> out;
    for (long long v : values) {
        if (v < 1) throw ConfigError(std::string(what) + " values must be >= 1");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

// Shared flag bundle; each experiment merges these into a KeyValueConfig,
// applies --config on top (the file wins), and reads final values back.
struct CommonFlags {
    std::string trace_path;
    std::vector<std::string> trace_paths;
    std::vector<std::string> policies;
    long long k = 0;
    uint64_t seed = 1;
    std::string out = "out";
    std::string config_path;
};

void add_common_output_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--seed", flags.seed, "base RNG seed");
    cmd->add_option("--out", flags.out, "output directory");
    cmd->add_option("--config", flags.config_path,
                    "key=value config file; overrides flags and is echoed to --out");
}

KeyValueConfig merge_config(const CommonFlags& flags,
                            const std::vector<std::pair<std::string, std::string>>& extra) {
    KeyValueConfig config;
    config.set("seed", std::to_string(flags.seed));
    config.set("out", flags.out);
    if (!flags.trace_paths.empty())
        config.set("trace", join(flags.trace_paths));
    else if (!flags.trace_path.empty())
        config.set("trace", flags.trace_path);
    if (!flags.policies.empty()) config.set("policies", join(flags.policies));
    if (flags.k > 0) config.set("k", std::to_string(flags.k));
    for (const auto& [key, value] : extra) config.set(key, value);
    if (!flags.config_path.empty()) config.apply_file(flags.config_path);
    return config;
}

int cmd_validate(const std::string& path) {
    const LayeredTrace trace = read_trace_file(path);
    const ValidationReport report = validate_trace(trace);
    std::cout << path << ": shape n=" << trace.shape.experts_per_layer
              << " l=" << trace.shape.num_layers << ", length " << trace.length() << ", "
              << report.describe() << "\n";
    return report.ok ? 0 : 1;
}

int cmd_stats(const std::string& path) {
    const LayeredTrace trace = read_trace_file(path);
    const TraceStats stats = trace_stats(trace);
    std::cout << path << ":\n"
              << "  shape: n=" << trace.shape.experts_per_layer
              << " l=" << trace.shape.num_layers << "\n"
              << "  length: " << stats.length << " (" << stats.rounds << " rounds)\n"
              << "  distinct pages: " << stats.distinct_pages << "\n";
    std::cout << "  requests per layer/expert:\n";
    for (size_t j = 0; j < stats.expert_frequency.size(); ++j) {
        std::cout << "    layer " << (j + 1) << ":";
        for (size_t e = 0; e < stats.expert_frequency[j].size(); ++e)
            std::cout << " " << stats.expert_frequency[j][e];
        std::cout << "\n";
    }
    if (!stats.re_reference.empty()) {
        long long total = 0, count = 0;
        long long shortest = stats.re_reference.begin()->first;
        long long longest = stats.re_reference.rbegin()->first;
        for (const auto& [gap, times] : stats.re_reference) {
            total += gap * times;
            count += times;
        }
        std::cout << "  re-reference gaps: min " << shortest << ", mean "
                  << format_double(static_cast<double>(total) / static_cast<double>(count), 4)
                  << ", max " << longest << " (over " << count << " re-references)\n";
    }
    return 0;
}

int cmd_generate(const std::string& kind, const KeyValueConfig& config,
                 const std::string& out_path) {
    const uint64_t seed = config.get_u64("seed", 1);
    const long long rounds = config.get_int("rounds", 1000);
    LayeredTrace trace;
    std::vector<std::string> provenance;

    if (kind == "zipf" || kind == "yao") {
        const ModelShape shape{static_cast<int>(config.get_int("n", 8)),
                               static_cast<int>(config.get_int("l", 32))};
        if (kind == "zipf") {
            ZipfParams params;
            params.a = config.get_double("a", 2.0);
            params.b = config.get_double("b", 0.0);
            params.per_layer_permutation = config.get_bool("per_layer_permutation", false);
            trace = gen_zipf(shape, params, rounds, seed);
            provenance = {"generator: zipf",
                          "params: n=" + std::to_string(shape.experts_per_layer) +
                              " l=" + std::to_string(shape.num_layers) +
                              " rounds=" + std::to_string(rounds) + " a=" +
                              format_double(params.a) + " b=" + format_double(params.b) +
                              " per_layer_permutation=" +
                              (params.per_layer_permutation ? "1" : "0") +
                              " seed=" + std::to_string(seed)};
        } else {
            trace = gen_yao_random(shape, rounds, seed);
            provenance = {"generator: uniform-random",
                          "params: n=" + std::to_string(shape.experts_per_layer) +
                              " l=" + std::to_string(shape.num_layers) +
                              " rounds=" + std::to_string(rounds) +
                              " seed=" + std::to_string(seed)};
        }
    } else if (kind == "lru-nemesis") {
        const CacheSize k{static_cast<int>(config.get_int("k", 5))};
        const int l = static_cast<int>(config.get_int("l", 2));
        const NemesisTraceSource source = gen_lru_nemesis(k, l);
        trace = source.rounds(rounds);
        provenance = {"generator: lru-nemesis",
                      "params: k=" + std::to_string(k.value) + " l=" + std::to_string(l) +
                          " rounds=" + std::to_string(rounds)};
    } else if (kind == "fixed-partition") {
        const ModelShape shape{static_cast<int>(config.get_int("n", 2)),
                               static_cast<int>(config.get_int("l", 2))};
        const int z = static_cast<int>(config.get_int("z", shape.num_layers));
        const CacheSize k{static_cast<int>(
            config.get_int("k", shape.experts_per_layer + shape.num_layers - 1))};
        trace = gen_fixed_partition_adversary(shape, z, rounds, k);
        provenance = {"generator: fixed-partition-adversary",
                      "params: n=" + std::to_string(shape.experts_per_layer) +
                          " l=" + std::to_string(shape.num_layers) + " z=" + std::to_string(z) +
                          " k=" + std::to_string(k.value) +
                          " rounds=" + std::to_string(rounds)};
    } else if (kind == "adaptive") {
        const ModelShape shape{static_cast<int>(config.get_int("n", 2)),
                               static_cast<int>(config.get_int("l", 2))};
        const std::string policy_name = config.get_string("policy", "lru");
        auto policy = make_policy(policy_name, seed);
        const AdversaryRun run = gen_adaptive_adversary(*policy, shape, rounds);
        trace = run.trace;
        provenance = {"generator: adaptive-adversary",
                      "params: n=" + std::to_string(shape.experts_per_layer) +
                          " l=" + std::to_string(shape.num_layers) +
                          " policy=" + policy_name + " rounds=" + std::to_string(rounds),
                      "driven policy faults: " + std::to_string(run.result.faults)};
        std::cout << "adaptive adversary: " << policy_name << " faulted " << run.result.faults
                  << " times over " << run.adversarial_rounds << " adversarial rounds\n";
    } else {
        throw ConfigError("unknown generator '" + kind +
                          "'; known: zipf, yao, lru-nemesis, fixed-partition, adaptive");
    }

    write_trace_file(out_path, trace, provenance);
    std::cout << "wrote " << out_path << " (" << trace.length() << " requests, "
              << trace.rounds() << " rounds)\n";
    return 0;
}

int cmd_ingest(const std::string& input, const std::string& out_path) {
    const RawMoeTrace raw = parse_moe_trace_file(input);
    const LayeredTrace trace = round_expand(raw);
    std::vector<std::string> provenance = {
        "ingested from: " + std::filesystem::path(input).filename().string(),
        "model: " + (raw.model.empty() ? std::string("(unlabeled)") : raw.model),
        "tokens: " + std::to_string(raw.token_count()) +
            ", experts per layer per token: " + std::to_string(raw.experts_used)};
    write_trace_file(out_path, trace, provenance);
    std::cout << "ingested " << raw.token_count() << " tokens (n="
              << raw.shape.experts_per_layer << ", l=" << raw.shape.num_layers
              << ", e=" << raw.experts_used << ") -> " << trace.length() << " requests at "
              << out_path << "\n";
    return 0;
}

int cmd_simulate(const CommonFlags& flags, bool no_out) {
    if (flags.trace_path.empty()) throw ConfigError("--trace is required");
    if (flags.k < 1) throw ConfigError("--k is required and must be >= 1");
    const std::vector<std::string> policies =
        flags.policies.empty() ? std::vector<std::string>{"lru"} : flags.policies;
    const LayeredTrace trace = read_trace_file(flags.trace_path);

    std::optional<long long> opt_faults;
    std::vector<SimResult> results;
    for (const std::string& name : policies) {
        results.push_back(run_policy(name, trace, CacheSize{static_cast<int>(flags.k)},
                                     flags.seed));
        if (name == "opt") opt_faults = results.back().faults;
    }

    CsvTable table("lpsim.simulate.v1", {"trace", "policy", "k", "faults", "normalized"});
    std::cout << "trace " << flags.trace_path << " (length " << trace.length() << "), k="
              << flags.k << "\n";
    for (const SimResult& result : results) {
        std::string normalized;
        if (opt_faults)
            normalized =
                format_double(static_cast<double>(result.faults) /
                              static_cast<double>(std::max(1ll, *opt_faults)));
        std::cout << "  " << result.policy_name << ": " << result.faults << " faults";
        if (!normalized.empty() && result.policy_name != "opt")
            std::cout << " (" << normalized << "x optimum)";
        std::cout << "\n";
        table.add_row({trace_stem(flags.trace_path), result.policy_name,
                       std::to_string(flags.k), std::to_string(result.faults), normalized});
    }
    if (!no_out) {
        ensure_directory(flags.out);
        table.write_file(flags.out + "/results.csv");
    }
    return 0;
}

int cmd_sweep_k(const CommonFlags& flags, const std::string& k_values) {
    KeyValueConfig config = merge_config(flags, {{"k_values", k_values}});
    const std::string trace_path = config.get_string("trace", "");
    if (trace_path.empty()) throw ConfigError("--trace is required");
    const LayeredTrace trace = read_trace_file(trace_path);

    SweepKExperiment experiment;
    experiment.policies = split_names(config.get_string("policies", "lru,llru,opt"));
    experiment.seed = config.get_u64("seed", 1);
    std::vector<long long> ks = config.get_int_list("k_values", {});
    if (ks.empty()) {
        // Default: powers of two up to the total page count, plus both endpoints.
        const long long total = trace.shape.total_pages();
        for (long long k = 1; k < total; k *= 2) ks.push_back(k);
        ks.push_back(total);
    }
    experiment.k_values = to_int_vector(ks, "k");

    const std::string out_dir = config.get_string("out", flags.out);
    const SweepKResult result = sweep_k(trace, trace_stem(trace_path), experiment);
    emit_sweep_k(result, out_dir);
    echo_config(config, out_dir);
    std::cout << "sweep-k: " << result.rows.size() << " runs -> " << out_dir << "\n";
    for (const auto& [policy, k] : result.non_monotone)
        std::cout << "  note: " << policy << " faults increased at k=" << k << "\n";
    return 0;
}

int cmd_compare(const CommonFlags& flags) {
    KeyValueConfig config = merge_config(flags, {});
    const std::vector<std::string> trace_paths =
        split_names(config.get_string("trace", ""));
    if (trace_paths.empty()) throw ConfigError("at least one --trace is required");

    CompareExperiment experiment;
    experiment.policies =
        split_names(config.get_string("policies", "lru,llru,marking,lru-dist,llru-dist,opt"));
    experiment.k = static_cast<int>(config.get_int("k", 0));
    if (experiment.k < 1) throw ConfigError("--k is required and must be >= 1");
    experiment.seed = config.get_u64("seed", 1);

    std::vector<LayeredTrace> traces;
    std::vector<std::string> ids;
    for (const std::string& path : trace_paths) {
        traces.push_back(read_trace_file(path));
        ids.push_back(trace_stem(path));
    }

    const std::string out_dir = config.get_string("out", flags.out);
    const CompareResult result = compare_normalized(traces, ids, experiment);
    emit_compare(result, out_dir);
    echo_config(config, out_dir);
    std::cout << "compare: " << traces.size() << " traces, k=" << experiment.k << " -> "
              << out_dir << "\n";
    for (const PolicySummary& s : result.summaries)
        std::cout << "  " << s.policy << ": median " << format_double(s.median) << " (min "
                  << format_double(s.min) << ", max " << format_double(s.max) << ")\n";
    return 0;
}

int cmd_grid(const CommonFlags& flags,
             const std::string& n_values, const std::string& l_values, double a, double b,
             long long rounds) {
    KeyValueConfig config = merge_config(
        flags,
        {{"n_values", n_values},
         {"l_values", l_values},
         {"a", format_double(a)},
         {"b", format_double(b)},
         {"rounds", std::to_string(rounds)}});

    GridExperiment experiment;
    experiment.n_values = to_int_vector(config.get_int_list("n_values", {1, 2, 4, 8, 16, 32}), "n");
    experiment.l_values = to_int_vector(config.get_int_list("l_values", {1, 2, 4, 8, 16, 32}), "l");
    experiment.k = static_cast<int>(config.get_int("k", 16));
    experiment.zipf.a = config.get_double("a", 2.0);
    experiment.zipf.b = config.get_double("b", 0.0);
    experiment.zipf.per_layer_permutation = config.get_bool("per_layer_permutation", false);
    experiment.rounds = config.get_int("rounds", 512);
    experiment.seed = config.get_u64("seed", 1);

    const std::string out_dir = config.get_string("out", flags.out);
    const GridResult result = grid_opt_vs_dist(experiment);
    emit_grid(result, out_dir);
    echo_config(config, out_dir);

    double worst = 1.0;
    for (const GridCell& cell : result.cells)
        if (cell.applicable) worst = std::max(worst, cell.ratio);
    std::cout << "grid-opt-dist: " << result.cells.size() << " cells, k=" << experiment.k
              << ", worst ratio " << format_double(worst) << " -> " << out_dir << "\n";
    return 0;
}

int cmd_sweep_zipf_a(const CommonFlags& flags,
                     const std::string& a_values, long long n, long long l, double b,
                     long long rounds) {
    KeyValueConfig config = merge_config(flags,
                                         {{"a_values", a_values},
                                          {"n", std::to_string(n)},
                                          {"l", std::to_string(l)},
                                          {"b", format_double(b)},
                                          {"rounds", std::to_string(rounds)}});

    ZipfASweepExperiment experiment;
    experiment.a_values =
        config.get_double_list("a_values", {0.01, 0.05, 0.1, 0.5, 1, 2, 5, 10, 50});
    experiment.shape = ModelShape{static_cast<int>(config.get_int("n", 8)),
                                  static_cast<int>(config.get_int("l", 32))};
    experiment.k = static_cast<int>(config.get_int("k", 64));
    experiment.b = config.get_double("b", 0.0);
    experiment.per_layer_permutation = config.get_bool("per_layer_permutation", false);
    experiment.rounds = config.get_int("rounds", 1000);
    experiment.seed = config.get_u64("seed", 1);

    const std::string out_dir = config.get_string("out", flags.out);
    const ZipfASweepResult result = sweep_zipf_a(experiment);
    emit_sweep_zipf_a(result, out_dir);
    echo_config(config, out_dir);
    std::cout << "sweep-zipf-a: " << result.points.size() << " points -> " << out_dir << "\n";
    for (const ZipfAPoint& point : result.points)
        std::cout << "  a=" << format_double(point.a) << ": ratio "
                  << format_double(point.ratio) << "\n";
    return 0;
}

int cmd_verify(const CommonFlags& flags, long long samples) {
    KeyValueConfig config =
        merge_config(flags, {{"coupon_samples", std::to_string(samples)}});

    VerifyOptions options;
    options.seed = config.get_u64("seed", 1);
    options.coupon_samples = config.get_int("coupon_samples", 100000);
    options.fixed_partition_rounds = config.get_int("fixed_partition_rounds", 10000);
    options.fixed_partition_min_ratio = config.get_double("fixed_partition_min_ratio", 50.0);
    options.adaptive_rounds = config.get_int("adaptive_rounds", 2000);
    options.nemesis_requests = config.get_int("nemesis_requests", 10000);
    options.oracle_traces = config.get_int("oracle_traces", 25);

    const std::string out_dir = config.get_string("out", flags.out);
    const TheoryReport report = verify_theory(options);
    emit_verify_report(report, out_dir);
    echo_config(config, out_dir);

    for (const TheoryCheck& check : report.checks)
        std::cout << (check.passed ? "[PASS] " : "[FAIL] ") << check.name << ": observed "
                  << format_double(check.observed) << " " << check.relation << " "
                  << format_double(check.threshold) << "\n";
    std::cout << "report: " << out_dir << "/report.json\n";
    return report.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"layered paging simulator: policies, offline optima, adversarial traces"};
    app.require_subcommand(1);
    int exit_code = 0;

    CommonFlags flags;

    auto* validate = app.add_subcommand("validate", "check a trace file's round structure");
    validate->add_option("--trace", flags.trace_path, "trace file")->required();
    validate->callback([&] { exit_code = cmd_validate(flags.trace_path); });

    auto* stats = app.add_subcommand("stats", "summarize a trace file");
    stats->add_option("--trace", flags.trace_path, "trace file")->required();
    stats->callback([&] { exit_code = cmd_stats(flags.trace_path); });

    auto* generate = app.add_subcommand("generate", "write a synthetic or adversarial trace");
    std::string gen_kind, gen_out;
    long long gen_n = 8, gen_l = 32, gen_rounds = 1000, gen_k = 0, gen_z = 0;
    double gen_a = 2.0, gen_b = 0.0;
    bool gen_perm = false;
    std::string gen_policy = "lru";
    generate->add_option("--kind", gen_kind,
                         "zipf | yao | lru-nemesis | fixed-partition | adaptive")
        ->required();
    generate->add_option("--out", gen_out, "output trace file")->required();
    generate->add_option("--n", gen_n, "experts per layer");
    generate->add_option("--l", gen_l, "layers");
    generate->add_option("--rounds", gen_rounds, "rounds to emit");
    generate->add_option("--k", gen_k, "cache size (nemesis / fixed-partition)");
    generate->add_option("--z", gen_z, "cycling layer (fixed-partition)");
    generate->add_option("--a", gen_a, "zipf exponent");
    generate->add_option("--b", gen_b, "zipf shift");
    generate->add_flag("--per-layer-permutation", gen_perm, "permute ranks per layer");
    generate->add_option("--policy", gen_policy, "driven policy (adaptive)");
    generate->add_option("--seed", flags.seed, "RNG seed");
    generate->callback([&] {
        KeyValueConfig config;
        config.set("seed", std::to_string(flags.seed));
        config.set("rounds", std::to_string(gen_rounds));
        config.set("n", std::to_string(gen_n));
        config.set("l", std::to_string(gen_l));
        config.set("a", format_double(gen_a));
        config.set("b", format_double(gen_b));
        config.set("per_layer_permutation", gen_perm ? "1" : "0");
        config.set("policy", gen_policy);
        if (gen_k > 0) config.set("k", std::to_string(gen_k));
        if (gen_z > 0) config.set("z", std::to_string(gen_z));
        exit_code = cmd_generate(gen_kind, config, gen_out);
    });

    auto* ingest = app.add_subcommand("ingest", "convert a JSONL expert-usage trace");
    std::string ingest_in, ingest_out;
    ingest->add_option("--input", ingest_in, "JSONL file")->required();
    ingest->add_option("--out", ingest_out, "output trace file")->required();
    ingest->callback([&] { exit_code = cmd_ingest(ingest_in, ingest_out); });

    auto* simulate = app.add_subcommand("simulate", "run policies over a trace");
    bool sim_no_out = false;
    simulate->add_option("--trace", flags.trace_path, "trace file")->required();
    simulate->add_option("--policy", flags.policies, "policy name (repeatable)");
    simulate->add_option("--k", flags.k, "cache size")->required();
    simulate->add_option("--seed", flags.seed, "RNG seed");
    simulate->add_option("--out", flags.out, "output directory");
    simulate->add_flag("--no-out", sim_no_out, "print only, write nothing");
    simulate->callback([&] { exit_code = cmd_simulate(flags, sim_no_out); });

    auto* sweep = app.add_subcommand("sweep-k", "faults vs cache size per policy");
    std::string sweep_ks;
    sweep->add_option("--trace", flags.trace_path, "trace file");
    sweep->add_option("--policy", flags.policies, "policy name (repeatable)");
    sweep->add_option("--k-values", sweep_ks, "comma-separated cache sizes");
    add_common_output_flags(sweep, flags);
    sweep->callback([&] {
        if (!flags.trace_path.empty()) flags.trace_paths = {flags.trace_path};
        exit_code = cmd_sweep_k(flags, sweep_ks);
    });

    auto* compare = app.add_subcommand("compare", "normalized fault distribution at fixed k");
    compare->add_option("--trace", flags.trace_paths, "trace file (repeatable)");
    compare->add_option("--policy", flags.policies, "policy name (repeatable)");
    compare->add_option("--k", flags.k, "cache size");
    add_common_output_flags(compare, flags);
    compare->callback([&] { exit_code = cmd_compare(flags); });

    auto* grid = app.add_subcommand("grid-opt-dist",
                                    "split-cache optimum penalty over an (n, l) grid");
    std::string grid_ns = "1,2,4,8,16,32", grid_ls = "1,2,4,8,16,32";
    double grid_a = 2.0, grid_b = 0.0;
    long long grid_rounds = 512;
    grid->add_option("--n-values", grid_ns, "comma-separated n axis");
    grid->add_option("--l-values", grid_ls, "comma-separated l axis");
    grid->add_option("--k", flags.k, "cache size");
    grid->add_option("--a", grid_a, "zipf exponent");
    grid->add_option("--b", grid_b, "zipf shift");
    grid->add_option("--rounds", grid_rounds, "rounds per cell");
    add_common_output_flags(grid, flags);
    grid->callback([&] {
        if (flags.k == 0) flags.k = 16;
        exit_code = cmd_grid(flags, grid_ns, grid_ls, grid_a, grid_b, grid_rounds);
    });

    auto* zsweep = app.add_subcommand("sweep-zipf-a",
                                      "split-cache optimum penalty vs zipf exponent");
    std::string zsweep_as = "0.01,0.05,0.1,0.5,1,2,5,10,50";
    long long zsweep_n = 8, zsweep_l = 32, zsweep_rounds = 1000;
    double zsweep_b = 0.0;
    zsweep->add_option("--a-values", zsweep_as, "comma-separated zipf exponents");
    zsweep->add_option("--n", zsweep_n, "experts per layer");
    zsweep->add_option("--l", zsweep_l, "layers");
    zsweep->add_option("--k", flags.k, "cache size");
    zsweep->add_option("--b", zsweep_b, "zipf shift");
    zsweep->add_option("--rounds", zsweep_rounds, "rounds per point");
    add_common_output_flags(zsweep, flags);
    zsweep->callback([&] {
        if (flags.k == 0) flags.k = 64;
        exit_code = cmd_sweep_zipf_a(flags, zsweep_as, zsweep_n, zsweep_l, zsweep_b,
                                     zsweep_rounds);
    });

    auto* verify = app.add_subcommand("verify-theory",
                                      "check the analytical lower bounds empirically");
    long long verify_samples = 100000;
    verify->add_option("--samples", verify_samples, "Monte Carlo samples per estimate");
    add_common_output_flags(verify, flags);
    verify->callback([&] { exit_code = cmd_verify(flags, verify_samples); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const OracleCapExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return exit_code;
}
