#pragma once

#include <stdexcept>
#include <string>

namespace pnlab {

/// Bad experiment description: nonconforming grid, unknown config key,
/// malformed value. Carries the offending line when it came from a file.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

/// A well-formed request that falls outside the domain of an operation
/// (slot outside the window, grid mismatch, too many lags, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace pnlab
