#ifndef LPSIM_MODEL_HPP
#define LPSIM_MODEL_HPP

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace lpsim {

/// Shape of the expert grid: n experts in each of l layers, n*l pages total.
struct ModelShape {
    int experts_per_layer = 1;  // n
    int num_layers = 1;         // l

    long long total_pages() const {
        return static_cast<long long>(experts_per_layer) * num_layers;
    }

    bool valid() const { return experts_per_layer >= 1 && num_layers >= 1; }

    friend bool operator==(const ModelShape&, const ModelShape&) = default;
};

/// One expert's weight page. Layers and experts are 1-indexed.
/// The default ordering (layer-major, then expert) is the canonical
/// deterministic tie-breaker used throughout the simulator.
struct PageId {
    int layer = 1;
    int expert = 1;

    friend auto operator<=>(const PageId&, const PageId&) = default;

    std::string str() const {
        return "(" + std::to_string(layer) + "," + std::to_string(expert) + ")";
    }
};

struct PageIdHash {
    size_t operator()(PageId p) const {
        return std::hash<uint64_t>{}((static_cast<uint64_t>(p.layer) << 32) |
                                     static_cast<uint32_t>(p.expert));
    }
};

/// Cache capacity in pages.
struct CacheSize {
    int value = 1;
};

/// Layer that position i (1-indexed) must request: ((i-1) mod l) + 1.
int layer_of_position(long long position, int num_layers);

/// 1-indexed round containing position i: ceil(i / l).
long long round_of_position(long long position, int num_layers);

/// A request sequence over a ModelShape. Positions are 1-indexed and the
/// request at position i is expected to come from layer_of_position(i, l);
/// construction does not enforce this, validate_trace() checks it.
struct LayeredTrace {
    ModelShape shape;
    std::vector<PageId> requests;

    long long length() const { return static_cast<long long>(requests.size()); }
    long long rounds() const {
        return (length() + shape.num_layers - 1) / shape.num_layers;
    }
};

enum class TraceViolation {
    none,
    wrong_layer,
    expert_out_of_range,
};

/// Outcome of validate_trace. `position` etc. describe the first violation;
/// `ragged_tail` notes a trace that ends mid-round, which is accepted (real
/// recorded traces may truncate mid-token) but worth surfacing to callers.
struct ValidationReport {
    bool ok = true;
    TraceViolation violation = TraceViolation::none;
    long long position = 0;
    int expected_layer = 0;
    int found_layer = 0;
    int expert = 0;
    bool ragged_tail = false;

    std::string describe() const;
};

ValidationReport validate_trace(const LayeredTrace& trace);

}  // namespace lpsim

template <>
struct std::hash<lpsim::PageId> : lpsim::PageIdHash {};

#endif
