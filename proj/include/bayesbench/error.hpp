#pragma once

#include <stdexcept>
#include <string>

namespace bayesbench {

/// Bad input: wrong dimension, unknown id, malformed config or data.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Lookup of an id that is not registered.
class NotFoundError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Filesystem or parse failure on an external artifact.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A fit whose diagnostics fail the convergence criteria.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bayesbench
