#pragma once

// Finite differences on the quasi-uniform grid xi = -c ln(1 - eta), eta = j / J.
// The last node sits at infinity, where u = 1 is imposed exactly; the
// difference formulas only ever touch finite fractional nodes.

#include "oceanbvp/block_newton.hpp"
#include "oceanbvp/mesh_solution.hpp"
#include "oceanbvp/model.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace oceanbvp {

/// Grid coordinate that may be the point at infinity.  Reading the value of
/// the infinite node is a logic error.
class GridPoint {
 public:
  static GridPoint finite(double xi) { return GridPoint(xi, false); }
  static GridPoint infinity() { return GridPoint(std::numeric_limits<double>::infinity(), true); }

  bool is_infinite() const { return infinite_; }
  double value() const {
    if (infinite_) throw std::logic_error("arithmetic on the grid node at infinity");
    return xi_;
  }

 private:
  GridPoint(double xi, bool infinite) : xi_(xi), infinite_(infinite) {}
  double xi_;
  bool infinite_;
};

class QuasiUniformGrid {
 public:
  QuasiUniformGrid(double c, std::size_t J) : c_(c), J_(J) {
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("grid parameter c must be positive");
    if (J < 3) throw std::invalid_argument("quasi-uniform grid needs J >= 3");
  }

  double c() const { return c_; }
  std::size_t intervals() const { return J_; }

  /// The grid generating function.
  double map(double eta) const { return -c_ * std::log1p(-eta); }

  GridPoint node(std::size_t j) const {
    if (j > J_) throw std::out_of_range("grid node index");
    if (j == J_) return GridPoint::infinity();
    return GridPoint::finite(at(static_cast<double>(j)));
  }

  /// xi at the fractional index j + alpha, 0 <= alpha < 1 (finite for j < J).
  double fractional(std::size_t j, double alpha) const {
    if (j >= J_ || !(alpha >= 0.0 && alpha < 1.0)) throw std::out_of_range("fractional node index");
    return at(static_cast<double>(j) + alpha);
  }

  /// Finite nodes xi_0..xi_{J-1}.
  std::vector<double> finite_nodes() const {
    std::vector<double> xs(J_);
    for (std::size_t j = 0; j < J_; ++j) xs[j] = at(static_cast<double>(j));
    return xs;
  }

 private:
  // -c ln(1 - s/J) written as c (ln J - ln(J - s)) so that xi_{J-1} = c ln J.
  double at(double s) const {
    const double J = static_cast<double>(J_);
    return s == 0.0 ? 0.0 : c_ * (std::log(J) - std::log(J - s));
  }

  double c_;
  std::size_t J_;
};

/// Interval coefficients of the scheme: step a, weight b on U_{j+1},
/// weight c on U_j.
struct IntervalCoefficients {
  double a;
  double b;
  double c;
};

/// Coefficients for interval [xi_j, xi_{j+1}].  On the last interval the
/// literal weights degenerate to (b, c) = (0, 1); with `freeze_last` the
/// previous interval's weights are reused instead.
inline IntervalCoefficients interval_coefficients(const QuasiUniformGrid& grid, std::size_t j,
                                                  bool freeze_last = true) {
  const std::size_t J = grid.intervals();
  if (j >= J) throw std::out_of_range("interval index");
  const double a = 2.0 * (grid.fractional(j, 0.75) - grid.fractional(j, 0.25));
  if (j + 1 == J) {
    if (freeze_last) {
      const auto prev = interval_coefficients(grid, j - 1, false);
      return {a, prev.b, prev.c};
    }
    return {a, 0.0, 1.0};
  }
  const double left = grid.node(j).value();
  const double right = grid.node(j + 1).value();
  const double half = grid.fractional(j, 0.5);
  return {a, (half - left) / (right - left), (right - half) / (right - left)};
}

/// Value at the interval midpoint from the two end values.
inline State3 midpoint_value(const State3& uj, const State3& uj1, const QuasiUniformGrid& grid, std::size_t j,
                             bool freeze_last = true) {
  const auto k = interval_coefficients(grid, j, freeze_last);
  return k.c * uj + k.b * uj1;
}

/// First derivative at the interval midpoint.
inline State3 midpoint_derivative(const State3& uj, const State3& uj1, const QuasiUniformGrid& grid,
                                  std::size_t j) {
  return (uj1 - uj) / interval_coefficients(grid, j).a;
}

struct QugProblem {
  ModelParams params;
  BcKind kind = BcKind::NoSlip;
  double c = 5.0;
  std::size_t J = 200;
  double tol = 1e-6;
  std::size_t max_iter = 100;
  bool freeze_last = true;
};

/// Stacked node values U_0..U_J; U_J holds the values at infinity.
using QugState = VectorXd;

inline constexpr Index kQugBlock = 3;

class QugSystem {
 public:
  explicit QugSystem(QugProblem prob) : prob_(std::move(prob)), grid_(prob_.c, prob_.J) {
    if (!(prob_.tol > 0.0)) throw std::invalid_argument("Newton tolerance must be positive");
    coeffs_.reserve(prob_.J);
    for (std::size_t j = 0; j < prob_.J; ++j) coeffs_.push_back(interval_coefficients(grid_, j, prob_.freeze_last));
  }

  Index block_size() const { return kQugBlock; }
  std::size_t intervals() const { return prob_.J; }
  const QuasiUniformGrid& grid() const { return grid_; }
  const QugProblem& problem() const { return prob_; }
  const std::vector<IntervalCoefficients>& coefficients() const { return coeffs_; }

  /// J interior blocks U_{j+1} - U_j - a f(b U_{j+1} + c U_j), then the
  /// boundary rows u(0), u'(0) or u''(0), u(inf) - 1.
  VectorXd residual(const QugState& v) const {
    check_size(v);
    VectorXd r(v.size());
    for (std::size_t j = 0; j < prob_.J; ++j) {
      const State3 left = node(v, j);
      const State3 right = node(v, j + 1);
      const auto& k = coeffs_[j];
      const State3 mid = k.b * right + k.c * left;
      r.segment<kQugBlock>(kQugBlock * static_cast<Index>(j)) = right - left - k.a * rhs(0.0, mid, prob_.params);
    }
    const State3 first = node(v, 0);
    const State3 last = node(v, prob_.J);
    auto bc = r.tail<kQugBlock>();
    bc[0] = first[0];
    bc[1] = first[pinned_slot(prob_.kind)];
    bc[2] = last[0] - 1.0;
    return r;
  }

  BlockJacobian jacobian(const QugState& v) const {
    check_size(v);
    BlockJacobian jac(kQugBlock, prob_.J);
    for (std::size_t j = 0; j < prob_.J; ++j) {
      const auto& k = coeffs_[j];
      const State3 mid = k.b * node(v, j + 1) + k.c * node(v, j);
      const Matrix3 df = rhs_jacobian(0.0, mid, prob_.params);
      jac.lower[j] = -Matrix3::Identity() - k.a * k.c * df;
      jac.diag[j] = Matrix3::Identity() - k.a * k.b * df;
    }
    jac.boundary_first(0, 0) = 1.0;
    jac.boundary_first(1, pinned_slot(prob_.kind)) = 1.0;
    jac.boundary_last(2, 0) = 1.0;
    return jac;
  }

 private:
  static State3 node(const QugState& v, std::size_t j) { return v.segment<kQugBlock>(kQugBlock * static_cast<Index>(j)); }

  void check_size(const QugState& v) const {
    if (v.size() != kQugBlock * static_cast<Index>(prob_.J + 1))
      throw std::invalid_argument("quasi-uniform state has wrong dimension");
  }

  QugProblem prob_;
  QuasiUniformGrid grid_;
  std::vector<IntervalCoefficients> coeffs_;
};

inline QuasiUniformGrid grid_build(double c, std::size_t J) { return QuasiUniformGrid(c, J); }

inline VectorXd qug_residual(const QugState& v, const QugProblem& prob) { return QugSystem(prob).residual(v); }

/// Default starting iterate: u = 1, u' = u'' = 0.1 at every node.
inline QugState qug_initial_guess(std::size_t J) {
  QugState v(kQugBlock * static_cast<Index>(J + 1));
  for (std::size_t j = 0; j <= J; ++j) v.segment<kQugBlock>(kQugBlock * static_cast<Index>(j)) << 1.0, 0.1, 0.1;
  return v;
}

struct QugSolution {
  MeshSolution mesh;
  NewtonReport report;
  QugState nodes;
};

inline MeshSolution qug_to_mesh(const QugState& v, const QugProblem& prob) {
  const QuasiUniformGrid grid(prob.c, prob.J);
  MeshSolution mesh;
  mesh.xi = grid.finite_nodes();
  mesh.states.reserve(prob.J);
  for (std::size_t j = 0; j < prob.J; ++j) mesh.states.push_back(v.segment<kQugBlock>(kQugBlock * static_cast<Index>(j)));
  mesh.at_infinity = v.tail<kQugBlock>();
  mesh.beta = v[missing_slot(prob.kind)];
  return mesh;
}

inline QugSolution solve_qug(const QugProblem& prob, std::optional<QugState> initial = std::nullopt) {
  const QugSystem sys(prob);
  NewtonOptions opts;
  opts.tol = prob.tol;
  opts.max_iter = prob.max_iter;
  auto [nodes, report] = newton_solve(sys, initial ? std::move(*initial) : qug_initial_guess(prob.J), opts);
  return {qug_to_mesh(nodes, prob), report, std::move(nodes)};
}

}  // namespace oceanbvp
