#pragma once

#include <stdexcept>
#include <string>

namespace mongemmd {

// Invalid arguments, shapes, configuration values or file contents.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Evaluation outside a function's domain (e.g. a kernel gradient at a kink).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Non-finite values, underflow, or a solver that cannot make progress.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Requested operation is not available for the given kernel / configuration.
class UnsupportedError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace mongemmd
