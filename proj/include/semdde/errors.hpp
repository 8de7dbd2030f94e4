#pragma once

#include <stdexcept>
#include <string>

namespace semdde {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A state-dependent delay evaluated to a negative value (an advance).
class NegativeDelayError : public Error {
 public:
  using Error::Error;
};

/// A history query fell outside the declared delay window.
class OutOfWindowError : public Error {
 public:
  using Error::Error;
};

class NewtonError : public Error {
 public:
  enum class Kind { MaxIterExceeded, SingularJacobian, NonfiniteResidual, Stagnation };

  NewtonError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  [[nodiscard]] Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

class NoHopfError : public Error {
 public:
  using Error::Error;
};

/// The function handed to the Bernstein-ellipse bound is not analytic there.
class AnalyticityViolation : public Error {
 public:
  using Error::Error;
};

/// Malformed or unsupported configuration or data file.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace semdde
