#include "lpsim/trace_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "lpsim/errors.hpp"

namespace lpsim {

namespace {

[[noreturn]] void fail(const std::string& source, long long line, const std::string& what) {
    throw ParseError(source + ":" + std::to_string(line) + ": " + what);
}

bool skippable(const std::string& line) {
    for (char c : line) {
        if (c == '#') return true;
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    }
    return true;  // all whitespace
}

}  // namespace

LayeredTrace read_trace(std::istream& in, const std::string& source_name) {
    std::string line;
    long long line_no = 0;

    // Header.
    LayeredTrace trace;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (skippable(line)) continue;
        std::istringstream header(line);
        std::string magic, version, n_field, l_field;
        header >> magic >> version >> n_field >> l_field;
        if (magic != "layered-trace" || version != "v1" || n_field.rfind("n=", 0) != 0 ||
            l_field.rfind("l=", 0) != 0)
            fail(source_name, line_no,
                 "expected header 'layered-trace v1 n=<n> l=<l>', got '" + line + "'");
        try {
            trace.shape.experts_per_layer = std::stoi(n_field.substr(2));
            trace.shape.num_layers = std::stoi(l_field.substr(2));
        } catch (const std::exception&) {
            fail(source_name, line_no, "malformed shape in header '" + line + "'");
        }
        if (!trace.shape.valid())
            fail(source_name, line_no, "header shape must have n >= 1 and l >= 1");
        have_header = true;
        break;
    }
    if (!have_header) fail(source_name, std::max(line_no, 1ll), "missing header line");

    // Body.
    while (std::getline(in, line)) {
        ++line_no;
        if (skippable(line)) continue;
        std::istringstream fields(line);
        int layer = 0, expert = 0;
        std::string extra;
        if (!(fields >> layer >> expert) || (fields >> extra))
            fail(source_name, line_no, "expected '<layer> <expert>', got '" + line + "'");
        if (layer < 1 || layer > trace.shape.num_layers)
            fail(source_name, line_no,
                 "layer " + std::to_string(layer) + " outside header shape (l=" +
                     std::to_string(trace.shape.num_layers) + ")");
        if (expert < 1 || expert > trace.shape.experts_per_layer)
            fail(source_name, line_no,
                 "expert " + std::to_string(expert) + " outside header shape (n=" +
                     std::to_string(trace.shape.experts_per_layer) + ")");
        trace.requests.push_back(PageId{layer, expert});
    }
    return trace;
}

LayeredTrace read_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open for reading");
    return read_trace(in, path);
}

void write_trace(std::ostream& out, const LayeredTrace& trace,
                 const std::vector<std::string>& comments) {
    out << "layered-trace v1 n=" << trace.shape.experts_per_layer << " l="
        << trace.shape.num_layers << "\n";
    for (const std::string& comment : comments) out << "# " << comment << "\n";
    for (const PageId& page : trace.requests) out << page.layer << " " << page.expert << "\n";
}

void write_trace_file(const std::string& path, const LayeredTrace& trace,
                      const std::vector<std::string>& comments) {
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open for writing");
    write_trace(out, trace, comments);
    if (!out) throw ParseError(path + ": write failed");
}

}  // namespace lpsim
