#include "lpsim/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "lpsim/errors.hpp"

namespace lpsim {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& source, long long line, const std::string& what) {
    throw ParseError(source + ":" + std::to_string(line) + ": " + what);
}

json parse_line(const std::string& source, long long line_no, const std::string& line) {
    json value = json::parse(line, nullptr, false);
    if (value.is_discarded()) fail(source, line_no, "malformed JSON");
    if (!value.is_object()) fail(source, line_no, "expected a JSON object");
    return value;
}

int require_positive_int(const json& obj, const char* key, const std::string& source,
                         long long line_no) {
    if (!obj.contains(key) || !obj[key].is_number_integer())
        fail(source, line_no, std::string("missing integer field \"") + key + "\"");
    const long long v = obj[key].get<long long>();
    if (v < 1) fail(source, line_no, std::string("field \"") + key + "\" must be >= 1");
    return static_cast<int>(v);
}

bool blank(const std::string& line) {
    for (char c : line)
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    return true;
}

}  // namespace

RawMoeTrace parse_moe_trace(std::istream& in, const std::string& source_name) {
    RawMoeTrace raw;
    std::string line;
    long long line_no = 0;

    // Header line.
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        const json header = parse_line(source_name, line_no, line);
        raw.shape.experts_per_layer = require_positive_int(header, "n", source_name, line_no);
        raw.shape.num_layers = require_positive_int(header, "l", source_name, line_no);
        raw.experts_used = require_positive_int(header, "e", source_name, line_no);
        if (raw.experts_used > raw.shape.experts_per_layer)
            fail(source_name, line_no, "e cannot exceed n");
        if (header.contains("model") && header["model"].is_string())
            raw.model = header["model"].get<std::string>();
        have_header = true;
        break;
    }
    if (!have_header) fail(source_name, std::max(line_no, 1ll), "missing header line");

    // Token lines.
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        const json token = parse_line(source_name, line_no, line);
        if (!token.contains("token") || !token["token"].is_number_integer())
            fail(source_name, line_no, "missing integer field \"token\"");
        const long long id = token["token"].get<long long>();
        if (id != raw.token_count())
            fail(source_name, line_no,
                 "token ids must be consecutive from 0; expected " +
                     std::to_string(raw.token_count()) + ", got " + std::to_string(id));
        if (!token.contains("layers") || !token["layers"].is_array())
            fail(source_name, line_no, "missing array field \"layers\"");
        const json& layers = token["layers"];
        if (static_cast<int>(layers.size()) != raw.shape.num_layers)
            fail(source_name, line_no,
                 "expected " + std::to_string(raw.shape.num_layers) + " layer entries, got " +
                     std::to_string(layers.size()));

        std::vector<std::vector<int>> token_layers;
        token_layers.reserve(layers.size());
        for (size_t j = 0; j < layers.size(); ++j) {
            const json& entry = layers[j];
            if (!entry.is_array() || static_cast<int>(entry.size()) != raw.experts_used)
                fail(source_name, line_no,
                     "layer " + std::to_string(j + 1) + " must list exactly " +
                         std::to_string(raw.experts_used) + " experts");
            std::vector<int> experts;
            std::set<int> seen;
            for (const json& item : entry) {
                if (!item.is_number_integer())
                    fail(source_name, line_no,
                         "layer " + std::to_string(j + 1) + " has a non-integer expert");
                const long long e = item.get<long long>();
                if (e < 1 || e > raw.shape.experts_per_layer)
                    fail(source_name, line_no,
                         "expert " + std::to_string(e) + " out of range [1, " +
                             std::to_string(raw.shape.experts_per_layer) + "] in layer " +
                             std::to_string(j + 1));
                if (!seen.insert(static_cast<int>(e)).second)
                    fail(source_name, line_no,
                         "duplicate expert " + std::to_string(e) + " in layer " +
                             std::to_string(j + 1));
                experts.push_back(static_cast<int>(e));
            }
            token_layers.push_back(std::move(experts));
        }
        raw.tokens.push_back(std::move(token_layers));
    }
    return raw;
}

RawMoeTrace parse_moe_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open for reading");
    return parse_moe_trace(in, path);
}

void serialize_moe_trace(std::ostream& out, const RawMoeTrace& raw) {
    json header;
    header["n"] = raw.shape.experts_per_layer;
    header["l"] = raw.shape.num_layers;
    header["e"] = raw.experts_used;
    header["model"] = raw.model;
    out << header.dump() << "\n";
    for (long long t = 0; t < raw.token_count(); ++t) {
        json token;
        token["token"] = t;
        token["layers"] = raw.tokens[static_cast<size_t>(t)];
        out << token.dump() << "\n";
    }
}

LayeredTrace round_expand(const RawMoeTrace& raw) {
    LayeredTrace trace;
    trace.shape = raw.shape;
    trace.requests.reserve(static_cast<size_t>(raw.token_count()) *
                           static_cast<size_t>(raw.experts_used) *
                           static_cast<size_t>(raw.shape.num_layers));
    for (const auto& token : raw.tokens)
        for (int rank = 0; rank < raw.experts_used; ++rank)
            for (int layer = 1; layer <= raw.shape.num_layers; ++layer)
                trace.requests.push_back(
                    PageId{layer, token[static_cast<size_t>(layer - 1)][static_cast<size_t>(rank)]});
    return trace;
}

TraceStats trace_stats(const LayeredTrace& trace) {
    TraceStats stats;
    stats.length = trace.length();
    stats.rounds = trace.rounds();
    stats.expert_frequency.assign(
        static_cast<size_t>(trace.shape.num_layers),
        std::vector<long long>(static_cast<size_t>(trace.shape.experts_per_layer), 0));

    std::unordered_map<PageId, long long, PageIdHash> last_seen;
    for (long long i = 1; i <= trace.length(); ++i) {
        const PageId page = trace.requests[static_cast<size_t>(i - 1)];
        stats.expert_frequency[static_cast<size_t>(page.layer - 1)]
                              [static_cast<size_t>(page.expert - 1)]++;
        auto it = last_seen.find(page);
        if (it != last_seen.end()) stats.re_reference[i - it->second]++;
        last_seen[page] = i;
    }
    stats.distinct_pages = static_cast<long long>(last_seen.size());
    return stats;
}

}  // namespace lpsim
