#ifndef LPSIM_TRACE_IO_HPP
#define LPSIM_TRACE_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "lpsim/model.hpp"

namespace lpsim {

/// Canonical trace file: a header line `layered-trace v1 n=<n> l=<l>`,
/// then one request per line as `<layer> <expert>`. Lines starting with `#`
/// and blank lines are ignored anywhere in the file; writers may record
/// provenance (generator, parameters, seed) in such comments.
///
/// Readers reject body lines whose layer or expert falls outside the header
/// shape. Whether the sequence respects the round structure is a separate
/// concern checked by validate_trace.

LayeredTrace read_trace(std::istream& in, const std::string& source_name = "<stream>");
LayeredTrace read_trace_file(const std::string& path);

void write_trace(std::ostream& out, const LayeredTrace& trace,
                 const std::vector<std::string>& comments = {});
void write_trace_file(const std::string& path, const LayeredTrace& trace,
                      const std::vector<std::string>& comments = {});

}  // namespace lpsim

#endif
