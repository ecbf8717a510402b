#pragma once

#include <stdexcept>
#include <string>

namespace genfe {

/// Base of every error raised by the library. Context (evaluator, workset,
/// element) is prepended as the error travels up through the assembly stack.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what), message_(what) {}

  const char* what() const noexcept override { return message_.c_str(); }

  void addContext(const std::string& context) { message_ = context + ": " + message_; }

 private:
  std::string message_;
};

/// Malformed input: configuration files, mesh files, parameter names.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Failure of a numerical procedure (domain violation, nonphysical state,
/// solver breakdown, non-convergence).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Argument outside a function's mathematical domain.
class DomainError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A kernel produced a state outside the physical model's range.
class NonphysicalStateError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Iterative or direct solver failed.
class SolverError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Inconsistent use of the library's data structures (mismatched
/// derivative dimensions, wrong layouts, cyclic graphs).
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace genfe
