#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace cim {

/// Caller supplied arguments that violate a precondition.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation that should succeed in exact arithmetic failed numerically.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The circumcenter of S(x) did not exist at the requested tolerance.
class ProperError : public NumericalError {
 public:
  ProperError(const std::string& what, double residual)
      : NumericalError(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// An iterate became non-finite.
class DivergenceError : public NumericalError {
 public:
  DivergenceError(const std::string& what, Eigen::VectorXd last_finite, long long iteration)
      : NumericalError(what), last_finite_(std::move(last_finite)), iteration_(iteration) {}
  const Eigen::VectorXd& last_finite() const noexcept { return last_finite_; }
  long long iteration() const noexcept { return iteration_; }

 private:
  Eigen::VectorXd last_finite_;
  long long iteration_;
};

/// Malformed or incompatible problem-set / CSV content.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cim
