#pragma once

#include <stdexcept>
#include <string>

namespace stabkit {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unreadable input data.
class DataError : public Error {
 public:
  enum class Kind {
    missing_file,
    missing_column,
    duplicate_column,
    empty_cell,
    non_numeric,
    non_finite,
    non_binary_response,
    ragged_row,
    invalid_shape,
  };

  DataError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Invalid or inconsistent tuning parameters (q, cutoff, PFER, B, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Boosting could not proceed (no fittable base-learner, q unreachable).
class FitError : public Error {
 public:
  using Error::Error;
};

/// Simulation grid configuration problems; the message carries the key path.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace stabkit
