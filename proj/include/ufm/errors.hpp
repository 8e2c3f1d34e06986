#pragma once

#include <stdexcept>
#include <string>

namespace ufm {

// Invalid problem/run configuration (bad dimensions, malformed config file,
// unknown keys, weightings that do not diagonalize, ...). CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure during a run (non-finite parameters, diverging loss).
// Carries the gradient step at which the problem was detected when known.
// CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what, long step = -1)
        : std::runtime_error(step >= 0 ? what + " (at step " + std::to_string(step) + ")"
                                       : what),
          step_(step) {}
    long step() const { return step_; }

private:
    long step_;
};

// Filesystem failure while emitting reports. CLI exit code 4.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ufm
