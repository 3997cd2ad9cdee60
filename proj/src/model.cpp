#include "lpsim/model.hpp"

#include <sstream>

namespace lpsim {

int layer_of_position(long long position, int num_layers) {
    return static_cast<int>((position - 1) % num_layers) + 1;
}

long long round_of_position(long long position, int num_layers) {
    return (position + num_layers - 1) / num_layers;
}

std::string ValidationReport::describe() const {
    std::ostringstream out;
    if (ok) {
        out << "OK";
        if (ragged_tail)
            out << " (trace ends mid-round)";
        return out.str();
    }
    out << "violation at position " << position << ": ";
    if (violation == TraceViolation::wrong_layer)
        out << "expected layer " << expected_layer << ", found layer " << found_layer;
    else
        out << "expert " << expert << " out of range in layer " << found_layer;
    return out.str();
}

ValidationReport validate_trace(const LayeredTrace& trace) {
    ValidationReport report;
    const int l = trace.shape.num_layers;
    const int n = trace.shape.experts_per_layer;
    for (long long i = 1; i <= trace.length(); ++i) {
        const PageId& page = trace.requests[static_cast<size_t>(i - 1)];
        const int expected = layer_of_position(i, l);
        if (page.layer != expected) {
            report.ok = false;
            report.violation = TraceViolation::wrong_layer;
            report.position = i;
            report.expected_layer = expected;
            report.found_layer = page.layer;
            report.expert = page.expert;
            return report;
        }
        if (page.expert < 1 || page.expert > n) {
            report.ok = false;
            report.violation = TraceViolation::expert_out_of_range;
            report.position = i;
            report.expected_layer = expected;
            report.found_layer = page.layer;
            report.expert = page.expert;
            return report;
        }
    }
    report.ragged_tail = trace.length() % l != 0;
    return report;
}

}  // namespace lpsim
