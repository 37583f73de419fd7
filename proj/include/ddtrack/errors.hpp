#pragma once

#include <stdexcept>
#include <string>

namespace ddtrack {

// All library failures derive from one of the std exception bases so callers
// can catch broadly; the concrete types let tests and the CLI discriminate.

class InvalidConstants : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NonFiniteInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of an operation (delta not in (0,1), ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class InfeasibleStepSize : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class NotContractive : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InsufficientData : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnsupportedFamily : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace ddtrack
