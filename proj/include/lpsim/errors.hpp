#ifndef LPSIM_ERRORS_HPP
#define LPSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace lpsim {

/// Invalid run configuration (bad generator parameters, k < l for a split
/// cache, unknown policy name, ...). Raised before any simulation work starts.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Malformed input file; message carries file/line context.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A policy broke the engine contract (e.g. returned a non-resident victim).
/// This is a programming error, not an input error; the run is aborted.
struct SimulationFault : std::logic_error {
    using std::logic_error::logic_error;
};

/// The exact-optimum oracle was asked for an instance above its search cap.
struct OracleCapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace lpsim

#endif
