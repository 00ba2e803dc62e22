#pragma once

#include <stdexcept>
#include <string>

namespace povmkit {

// Base class for everything this library throws on purpose. The CLI maps the
// subclasses onto distinct process exit codes, so keep the taxonomy small:
//   ValidationError / DimensionError -> 1   bad mathematical input
//   ParseError                       -> 2   unreadable file or malformed document
//   NumericalError                   -> 3   computation left its domain
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input violates a mathematical contract (not a state, not a POVM, ...).
struct ValidationError : Error {
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

// Operand shapes are incompatible (mismatched dimensions, wrong lengths).
struct DimensionError : Error {
    explicit DimensionError(const std::string& msg) : Error(msg) {}
};

// A file or document could not be read or decoded.
struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

// A numeric computation produced non-finite values or hit a degenerate case.
struct NumericalError : Error {
    explicit NumericalError(const std::string& msg) : Error(msg) {}
};

} // namespace povmkit
