#pragma once

#include <stdexcept>
#include <string>

namespace mrid {

/// Frequency-response evaluation failed (pole on the unit circle, singular
/// return difference, ...).
class EvalError : public std::runtime_error {
public:
    explicit EvalError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Closed-loop simulation diverged past the configured threshold.
class InstabilityError : public std::runtime_error {
public:
    explicit InstabilityError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed configuration or data file.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace mrid
