#pragma once

#include <stdexcept>
#include <string>

namespace qsd {

// Invalid parameter values or inconsistent object combinations
// (cutoff mismatches, out-of-range transmittance, malformed POVMs, ...).
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// API misuse that is independent of numeric parameter values,
// e.g. an empty mode list where at least one mode is required.
class UsageError : public std::invalid_argument {
public:
    explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

// A Fock cutoff too small to represent the requested state to the
// requested tolerance.  Carries the cutoff that would have sufficed.
class CutoffError : public ConfigError {
public:
    CutoffError(const std::string& what, int required_n_max)
        : ConfigError(what), required_n_max_(required_n_max) {}
    int required_n_max() const { return required_n_max_; }

private:
    int required_n_max_;
};

// A configuration whose heralded outcome has zero (or numerically zero)
// probability, so no conditional state exists.
class DegenerateError : public std::runtime_error {
public:
    explicit DegenerateError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace qsd
