#pragma once

#include <stdexcept>
#include <string>

namespace orlicz {

// Base for every error raised by the library; the CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A function produced NaN (or a forbidden infinity) at a quadrature/sampling node.
class DomainEvaluationError : public Error {
 public:
  DomainEvaluationError(const std::string& what, double abscissa)
      : Error(what), abscissa_(abscissa) {}
  double abscissa() const noexcept { return abscissa_; }

 private:
  double abscissa_;
};

// Adaptive routine ran out of depth/panels. Carries the best estimate reached.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double estimate, double error_bound)
      : Error(what), estimate_(estimate), error_bound_(error_bound) {}
  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

class PoleProximityError : public Error {
 public:
  PoleProximityError(const std::string& what, double abscissa)
      : Error(what), abscissa_(abscissa) {}
  double abscissa() const noexcept { return abscissa_; }

 private:
  double abscissa_;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

// A supremum lies at infinity: conjugate bracket exhaustion or a sup-over-p
// scan that is still rising after the allowed grid extensions.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

class ConstructionError : public Error {
 public:
  using Error::Error;
};

class SummabilityError : public Error {
 public:
  using Error::Error;
};

class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class RejectedInputError : public Error {
 public:
  using Error::Error;
};

}  // namespace orlicz
