#pragma once

#include <stdexcept>
#include <string>

namespace csalsa {

/// Shape mismatch, out-of-range parameter or violated precondition.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The requested operator/frame/regularizer combination has no closed-form
/// path. Raised instead of falling back to a dense computation.
class CapabilityError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Configuration text could not be parsed or validated.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, int line = 0, std::string field = {})
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line), field_(std::move(field)) {}

    int line() const { return line_; }
    const std::string& field() const { return field_; }

private:
    int line_;
    std::string field_;
};

}  // namespace csalsa
