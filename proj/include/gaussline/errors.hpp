#pragma once

#include <stdexcept>
#include <string>

namespace gaussline {

// Bad argument outside the mathematical domain of an operation
// (empty word, digit outside an alphabet, s <= 1/2 for eta_constants, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A real argument outside the interval an operation accepts.
class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// Enumeration or quadrature would exceed the configured work budget.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// pressure_root was handed an interval that does not straddle a sign change.
class BracketError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Truncated mass larger than the caller allowed, or a divergent tail.
class PrecisionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace gaussline
