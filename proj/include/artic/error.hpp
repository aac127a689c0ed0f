#pragma once

#include <stdexcept>
#include <string>

namespace artic {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Caller handed us data that violates a documented precondition.
struct InvalidInputError : Error {
  explicit InvalidInputError(const std::string& msg) : Error(msg) {}
};

/// Configuration value out of range or inconsistent.
struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Motion too close to identity to decompose into a joint.
struct DegenerateJointError : Error {
  explicit DegenerateJointError(const std::string& msg) : Error(msg) {}
};

/// File missing, malformed, or failed to write.
struct IoError : Error {
  explicit IoError(const std::string& msg) : Error(msg) {}
};

/// Optimization produced a non-finite loss; message carries stage and step.
struct DivergenceError : Error {
  explicit DivergenceError(const std::string& msg) : Error(msg) {}
};

}  // namespace artic
