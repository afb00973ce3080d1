#pragma once

#include <stdexcept>
#include <string>

namespace contact {

/// Raised when a parameter violates an operation's precondition.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A map whose conformal factor vanishes (|lambda| < 1e-10).
class DegenerateMap : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-positive or non-finite values inside a rate-fit window.
class RateUndefined : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Experiment configuration rejected; the message carries the JSON path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace contact
