#ifndef LPSIM_INGEST_HPP
#define LPSIM_INGEST_HPP

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "lpsim/model.hpp"

namespace lpsim {

/// A recorded expert-routing trace from a model that activates e experts per
/// layer per token. tokens[t][j-1] lists the e experts token t used in layer
/// j, in selection-rank order (first-choice expert first).
struct RawMoeTrace {
    ModelShape shape;
    int experts_used = 1;  // e
    std::string model;     // free-form label from the file header
    std::vector<std::vector<std::vector<int>>> tokens;

    long long token_count() const { return static_cast<long long>(tokens.size()); }
};

/// JSONL wire format, one object per line:
///   header  {"n": 8, "l": 32, "e": 2, "model": "..."}    (first line)
///   token   {"token": 0, "layers": [[e ints] x l]}
/// Token ids must be consecutive from 0. Every expert index must lie in
/// [1, n] and the e experts within one layer entry must be distinct.
/// Errors carry the offending line number.
RawMoeTrace parse_moe_trace(std::istream& in, const std::string& source_name = "<stream>");
RawMoeTrace parse_moe_trace_file(const std::string& path);

void serialize_moe_trace(std::ostream& out, const RawMoeTrace& raw);

/// Expands each token into e consecutive rounds: round r requests every
/// layer's r-th listed expert, in layer order. Output length = tokens * e * l.
LayeredTrace round_expand(const RawMoeTrace& raw);

/// Descriptive statistics over a layered trace.
struct TraceStats {
    long long length = 0;
    long long rounds = 0;
    long long distinct_pages = 0;
    /// expert_frequency[j-1][i-1] = number of requests for expert i in layer j.
    std::vector<std::vector<long long>> expert_frequency;
    /// Distribution of gaps between successive requests of the same page,
    /// in requests: re_reference[g] = how many times a page was re-requested
    /// exactly g positions after its previous use.
    std::map<long long, long long> re_reference;
};

TraceStats trace_stats(const LayeredTrace& trace);

}  // namespace lpsim

#endif
