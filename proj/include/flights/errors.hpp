#pragma once

#include <stdexcept>
#include <string>

namespace flights {

// Bad user-supplied parameters (domain specs, config files, CLI flags).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// An operation was called outside its documented domain of validity.
class PreconditionError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A least-squares fit could not be carried out on the requested window.
class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Broken internal invariant (non-finite state, impossible branch).
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace flights
