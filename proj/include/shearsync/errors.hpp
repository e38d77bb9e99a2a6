#pragma once

#include <stdexcept>
#include <string>

namespace shearsync {

// Trajectory left the physical regime (|E|^2 > 1e9 or |N| > 1e6) or went
// non-finite; carries the model time at which it happened.
class BlowUpError : public std::runtime_error {
public:
    BlowUpError(double t, const std::string& what)
        : std::runtime_error(what + " at t=" + std::to_string(t)), t_(t) {}
    double time() const { return t_; }

private:
    double t_;
};

// Invalid parameter or config value (maps to CLI exit code 2).
class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Checkpoint does not match the config it is resumed with (CLI exit code 3).
class CheckpointMismatchError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operation called outside its mathematical domain (J <= 0, E = 0, ...).
class DomainError : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Filesystem failure while reading or writing artifacts (CLI exit code 1).
class IoError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace shearsync
