#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace oceanbvp {

/// Base class of every failure raised by the solvers.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A state component left the representable range during an IVP integration.
/// `beta` is filled in by the shooting layer when the integration was a trial shot.
class Overflow : public SolverError {
 public:
  Overflow(double t_reached, std::optional<double> beta = std::nullopt)
      : SolverError(describe(t_reached, beta)), t_reached_(t_reached), beta_(beta) {}

  double t_reached() const noexcept { return t_reached_; }
  std::optional<double> beta() const noexcept { return beta_; }

 private:
  static std::string describe(double t, std::optional<double> beta) {
    std::string msg = "overflow in IVP integration at xi = " + std::to_string(t);
    if (beta) msg += " (beta = " + std::to_string(*beta) + ")";
    return msg;
  }

  double t_reached_;
  std::optional<double> beta_;
};

class StepCountExceeded : public SolverError {
 public:
  explicit StepCountExceeded(std::size_t steps)
      : SolverError("IVP step limit of " + std::to_string(steps) + " reached") {}
};

class StepSizeUnderflow : public SolverError {
 public:
  explicit StepSizeUnderflow(double t)
      : SolverError("IVP step size underflow at t = " + std::to_string(t)) {}
};

class MaxIterations : public SolverError {
 public:
  explicit MaxIterations(std::size_t cap)
      : SolverError("no convergence within " + std::to_string(cap) + " iterations") {}
};

class DegenerateSecant : public SolverError {
 public:
  DegenerateSecant() : SolverError("secant denominator vanished") {}
};

class SingularDerivative : public SolverError {
 public:
  SingularDerivative() : SolverError("shooting derivative dF/dbeta vanished") {}
};

class SingularJacobian : public SolverError {
 public:
  explicit SingularJacobian(std::size_t stage)
      : SolverError("singular Newton matrix (pivot underflow at block " + std::to_string(stage) + ")") {}
};

class NegativeFreeBoundary : public SolverError {
 public:
  explicit NegativeFreeBoundary(double value)
      : SolverError("free boundary became non-positive: " + std::to_string(value)) {}
};

}  // namespace oceanbvp
