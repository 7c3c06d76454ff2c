#pragma once

// Truncated-boundary shooting: u(inf) = 1 is imposed at a finite xi_inf and
// the missing initial value beta is a root of F(beta) = u(xi_inf; beta) - 1.

#include "oceanbvp/errors.hpp"
#include "oceanbvp/ivp.hpp"
#include "oceanbvp/mesh_solution.hpp"
#include "oceanbvp/model.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace oceanbvp {

struct ShootingProblem {
  ModelParams params;
  BcKind kind = BcKind::NoSlip;
  double xi_infinity = 10.0;
  double tol = 1e-6;
  IvpOptions ivp;
  std::size_t max_iterations = 50;
  /// Uniform samples of the re-integrated trajectory at the converged beta.
  std::size_t trajectory_points = 200;

  void validate() const {
    if (!(xi_infinity > 0.0)) throw std::invalid_argument("xi_infinity must be positive");
    if (!(tol > 0.0)) throw std::invalid_argument("shooting tolerance must be positive");
    if (trajectory_points < 2) throw std::invalid_argument("need at least two trajectory samples");
    ivp.validate();
  }
};

struct ShootingResult {
  double beta = 0.0;
  /// Index n of the accepted iterate beta_n.  Secant seeds are beta_0 and
  /// beta_1, so a secant solve reports one more than its number of updates.
  std::size_t iterations = 0;
  std::size_t updates = 0;     // root-finder steps actually taken
  double residual = 0.0;       // |F(beta)|
  MeshSolution trajectory;
  IvpStats stats;              // cumulative over every shot of the solve
};

struct ShotValue {
  double residual;    // F(beta)
  double derivative;  // dF/dbeta, only filled by the variational shot
  IvpStats stats;
};

/// Both halves of the stopping test must hold: relative beta change and |F|.
inline bool shooting_converged(double beta_prev, double beta, double residual, double tol) {
  return std::abs(beta - beta_prev) / std::abs(beta) < tol && std::abs(residual) < tol;
}

namespace detail {

inline ShotValue shoot(double beta, const ShootingProblem& prob) {
  const auto f = [&p = prob.params](double xi, const State3& u) { return rhs(xi, u, p); };
  try {
    auto r = integrate(f, 0.0, prob.xi_infinity, bc_initial(prob.kind, beta), prob.ivp);
    return {r.y[0] - 1.0, 0.0, r.stats};
  } catch (const Overflow& e) {
    throw Overflow(e.t_reached(), beta);
  }
}

inline ShotValue shoot_variational(double beta, const ShootingProblem& prob) {
  const auto f = [&p = prob.params](double xi, const State6& y) { return rhs_variational(xi, y, p); };
  try {
    auto r = integrate(f, 0.0, prob.xi_infinity, bc_initial_variational(prob.kind, beta), prob.ivp);
    return {r.y[0] - 1.0, r.y[3], r.stats};
  } catch (const Overflow& e) {
    throw Overflow(e.t_reached(), beta);
  }
}

// Re-integrates the accepted shot with dense output at uniform samples.  The
// same system as the shot is integrated so the step sequence, and thus the
// value at xi_inf, is reproduced exactly.
inline MeshSolution sample_trajectory(double beta, const ShootingProblem& prob, bool variational = false) {
  const std::size_t n = prob.trajectory_points;
  std::vector<double> ts(n - 1);
  for (std::size_t i = 1; i < n; ++i)
    ts[i - 1] = prob.xi_infinity * static_cast<double>(i) / static_cast<double>(n - 1);
  ts.back() = prob.xi_infinity;
  const std::span<const double> span(ts);

  std::vector<State3> states;
  states.reserve(ts.size());
  if (variational) {
    const auto f = [&p = prob.params](double xi, const State6& y) { return rhs_variational(xi, y, p); };
    for (const auto& y : integrate_dense(f, 0.0, span, bc_initial_variational(prob.kind, beta), prob.ivp).y)
      states.push_back(y.head<3>());
  } else {
    const auto f = [&p = prob.params](double xi, const State3& u) { return rhs(xi, u, p); };
    states = integrate_dense(f, 0.0, span, bc_initial(prob.kind, beta), prob.ivp).y;
  }

  MeshSolution sol;
  sol.beta = beta;
  sol.xi.reserve(n);
  sol.states.reserve(n);
  sol.xi.push_back(0.0);
  sol.states.push_back(bc_initial(prob.kind, beta));
  for (std::size_t i = 0; i < ts.size(); ++i) {
    sol.xi.push_back(ts[i]);
    sol.states.push_back(states[i]);
  }
  return sol;
}

}  // namespace detail

/// F(beta) = u(xi_inf; beta) - 1.
inline double shoot_residual(double beta, const ShootingProblem& prob) {
  prob.validate();
  return detail::shoot(beta, prob).residual;
}

/// F(beta) together with F'(beta) = du/dbeta (xi_inf) from the sensitivity system.
inline ShotValue shoot_with_derivative(double beta, const ShootingProblem& prob) {
  prob.validate();
  return detail::shoot_variational(beta, prob);
}

/// Secant iteration on the three-equation system.
inline ShootingResult solve_secant(double beta0, double beta1, const ShootingProblem& prob) {
  prob.validate();
  if (beta0 == beta1) throw std::invalid_argument("secant seeds must differ");

  ShootingResult res;
  auto shot0 = detail::shoot(beta0, prob);
  auto shot1 = detail::shoot(beta1, prob);
  res.stats += shot0.stats;
  res.stats += shot1.stats;
  double f0 = shot0.residual;
  double f1 = shot1.residual;

  while (res.updates < prob.max_iterations) {
    const double df = f1 - f0;
    if (std::abs(df) < 1e-14) throw DegenerateSecant();
    const double beta2 = beta1 - f1 * (beta1 - beta0) / df;
    const auto shot = detail::shoot(beta2, prob);
    res.stats += shot.stats;
    ++res.updates;

    beta0 = beta1;
    f0 = f1;
    beta1 = beta2;
    f1 = shot.residual;
    if (shooting_converged(beta0, beta1, f1, prob.tol)) {
      res.iterations = res.updates + 1;
      res.beta = beta1;
      res.residual = std::abs(f1);
      res.trajectory = detail::sample_trajectory(beta1, prob);
      return res;
    }
  }
  throw MaxIterations(prob.max_iterations);
}

/// Newton iteration on the six-equation (state plus sensitivity) system.
inline ShootingResult solve_newton(double beta0, const ShootingProblem& prob) {
  prob.validate();

  ShootingResult res;
  double beta = beta0;
  auto shot = detail::shoot_variational(beta, prob);
  res.stats += shot.stats;

  while (res.updates < prob.max_iterations) {
    if (std::abs(shot.derivative) < 1e-14) throw SingularDerivative();
    const double next = beta - shot.residual / shot.derivative;
    shot = detail::shoot_variational(next, prob);
    res.stats += shot.stats;
    ++res.updates;

    const double prev = beta;
    beta = next;
    if (shooting_converged(prev, beta, shot.residual, prob.tol)) {
      res.iterations = res.updates;
      res.beta = beta;
      res.residual = std::abs(shot.residual);
      res.trajectory = detail::sample_trajectory(beta, prob, true);
      return res;
    }
  }
  throw MaxIterations(prob.max_iterations);
}

}  // namespace oceanbvp
