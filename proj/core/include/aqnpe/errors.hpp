#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace aqnpe {

/// Caller violated a documented precondition (dimension mismatch, zero
/// displacement, parameter out of range).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computed quantity became non-finite or a recurrence broke down.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameters are mutually inconsistent in a way only detectable at run time,
/// e.g. a step size collapsing because the supplied smoothness constant is
/// smaller than the true one.
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative method hit its iteration cap. Carries the best iterate seen.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, Eigen::VectorXd best)
      : std::runtime_error(what), best_(std::move(best)) {}

  const Eigen::VectorXd& best() const noexcept { return best_; }

 private:
  Eigen::VectorXd best_;
};

}  // namespace aqnpe
