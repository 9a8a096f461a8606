#pragma once

#include <stdexcept>
#include <string>

namespace gpc {

/// Bad shapes, invalid parameters, violated preconditions.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base for failures that come from the numerics rather than the caller.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// ODE integration produced a non-finite state.
class IntegrationError : public NumericalError {
 public:
  IntegrationError(const std::string& what, double time)
      : NumericalError(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Cholesky factorization failed even after the largest jitter.
class IllConditionedError : public NumericalError {
 public:
  IllConditionedError(const std::string& what, double jitter)
      : NumericalError(what), jitter_(jitter) {}
  double jitter() const noexcept { return jitter_; }

 private:
  double jitter_;
};

/// Operation requested in a mode the inputs do not support
/// (e.g. sampling corrections without a ground-truth correction).
class ModeError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Combinatorial guard exceeded.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

class UnsupportedKernelError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace gpc
