#pragma once

// Newton iteration for discretized two-point boundary value problems.
//
// Unknowns are J+1 node vectors V_0..V_J of size m, stacked.  The residual
// holds J interior blocks, block j (1-based) depending only on V_{j-1} and
// V_j, followed by one block of m boundary rows depending only on V_0 and
// V_J.  The Newton matrix is therefore block lower bidiagonal with a single
// border row that may touch both ends.

#include "oceanbvp/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oceanbvp {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct BlockJacobian {
  Index block_size = 0;
  std::vector<MatrixXd> lower;  // d r_j / d V_{j-1}, j = 1..J
  std::vector<MatrixXd> diag;   // d r_j / d V_j
  MatrixXd boundary_first;      // d g / d V_0
  MatrixXd boundary_last;       // d g / d V_J

  BlockJacobian() = default;
  BlockJacobian(Index m, std::size_t intervals)
      : block_size(m),
        lower(intervals, MatrixXd::Zero(m, m)),
        diag(intervals, MatrixXd::Zero(m, m)),
        boundary_first(MatrixXd::Zero(m, m)),
        boundary_last(MatrixXd::Zero(m, m)) {}

  std::size_t intervals() const { return lower.size(); }
  Index dimension() const { return block_size * static_cast<Index>(intervals() + 1); }

  /// Assembled matrix in the residual's row order (small instances only).
  MatrixXd to_dense() const {
    const Index m = block_size;
    const Index n = dimension();
    MatrixXd a = MatrixXd::Zero(n, n);
    for (std::size_t j = 0; j < intervals(); ++j) {
      const Index row = m * static_cast<Index>(j);
      a.block(row, row, m, m) = lower[j];
      a.block(row, row + m, m, m) = diag[j];
    }
    a.block(n - m, 0, m, m) += boundary_first;
    a.block(n - m, n - m, m, m) += boundary_last;
    return a;
  }
};

namespace detail {

// Row-pivoted elimination of the first `m` columns of `w`.  Afterwards the
// first m rows hold an upper-triangular pivot block and the remaining rows
// are zero in those columns.
inline void eliminate_leading_columns(MatrixXd& w, Index m, std::size_t stage) {
  const Index rows = w.rows();
  for (Index col = 0; col < m; ++col) {
    Index pivot = col;
    w.col(col).tail(rows - col).cwiseAbs().maxCoeff(&pivot);
    pivot += col;
    if (std::abs(w(pivot, col)) < 1e-13) throw SingularJacobian(stage);
    if (pivot != col) w.row(pivot).swap(w.row(col));
    for (Index r = col + 1; r < rows; ++r) {
      const double factor = w(r, col) / w(col, col);
      if (factor == 0.0) continue;
      w.row(r).tail(w.cols() - col) -= factor * w.row(col).tail(w.cols() - col);
      w(r, col) = 0.0;
    }
  }
}

struct EliminationStage {
  MatrixXd pivot;  // upper triangular, m x m
  MatrixXd next;   // coupling to the following node
  MatrixXd last;   // coupling to V_J (empty on the final stage)
  VectorXd rhs;
};

}  // namespace detail

/// Solves jac * x = rhs in O(J m^3) by sweeping the chain from V_0 to V_J.
/// The boundary rows are carried along as a pending block whose V_J
/// columns form the border.
inline VectorXd solve_bordered_block(const BlockJacobian& jac, const VectorXd& rhs) {
  const Index m = jac.block_size;
  const std::size_t intervals = jac.intervals();
  if (m <= 0 || intervals == 0 || jac.diag.size() != intervals)
    throw std::invalid_argument("malformed block Jacobian");
  if (rhs.size() != jac.dimension()) throw std::invalid_argument("right-hand side has wrong dimension");

  // Pending rows: P V_k + Q V_J = p.
  MatrixXd pend_node = jac.boundary_first;
  MatrixXd pend_last = jac.boundary_last;
  VectorXd pend_rhs = rhs.tail(m);

  std::vector<detail::EliminationStage> stages(intervals);
  VectorXd x(jac.dimension());

  for (std::size_t k = 0; k < intervals; ++k) {
    const bool final_stage = k + 1 == intervals;
    const VectorXd interior_rhs = rhs.segment(m * static_cast<Index>(k), m);

    if (!final_stage) {
      // Columns: V_k | V_{k+1} | V_J | rhs
      MatrixXd w = MatrixXd::Zero(2 * m, 3 * m + 1);
      w.block(0, 0, m, m) = pend_node;
      w.block(0, 2 * m, m, m) = pend_last;
      w.block(0, 3 * m, m, 1) = pend_rhs;
      w.block(m, 0, m, m) = jac.lower[k];
      w.block(m, m, m, m) = jac.diag[k];
      w.block(m, 3 * m, m, 1) = interior_rhs;
      detail::eliminate_leading_columns(w, m, k);

      stages[k] = {w.block(0, 0, m, m), w.block(0, m, m, m), w.block(0, 2 * m, m, m), w.block(0, 3 * m, m, 1)};
      pend_node = w.block(m, m, m, m);
      pend_last = w.block(m, 2 * m, m, m);
      pend_rhs = w.block(m, 3 * m, m, 1);
    } else {
      // Columns: V_{J-1} | V_J | rhs
      MatrixXd w = MatrixXd::Zero(2 * m, 2 * m + 1);
      w.block(0, 0, m, m) = pend_node;
      w.block(0, m, m, m) = pend_last;
      w.block(0, 2 * m, m, 1) = pend_rhs;
      w.block(m, 0, m, m) = jac.lower[k];
      w.block(m, m, m, m) = jac.diag[k];
      w.block(m, 2 * m, m, 1) = interior_rhs;
      detail::eliminate_leading_columns(w, m, k);

      stages[k] = {w.block(0, 0, m, m), w.block(0, m, m, m), MatrixXd(), w.block(0, 2 * m, m, 1)};

      // Remaining m rows involve V_J only.
      MatrixXd tail = w.block(m, m, m, m + 1);
      detail::eliminate_leading_columns(tail, m, intervals);
      x.tail(m) = tail.leftCols(m).triangularView<Eigen::Upper>().solve(tail.col(m));
    }
  }

  const VectorXd x_last = x.tail(m);
  for (std::size_t k = intervals; k-- > 0;) {
    const auto& st = stages[k];
    VectorXd b = st.rhs - st.next * x.segment(m * static_cast<Index>(k + 1), m);
    if (st.last.size() > 0) b -= st.last * x_last;
    x.segment(m * static_cast<Index>(k), m) = st.pivot.triangularView<Eigen::Upper>().solve(b);
  }
  return x;
}

/// Anything exposing the block layout, a residual and its block Jacobian.
template <class S>
concept BlockSystemLike = requires(const S& s, const VectorXd& v) {
  { s.block_size() } -> std::convertible_to<Index>;
  { s.intervals() } -> std::convertible_to<std::size_t>;
  { s.residual(v) } -> std::convertible_to<VectorXd>;
  { s.jacobian(v) } -> std::convertible_to<BlockJacobian>;
};

/// Type-erased block system, handy for tests and one-off problems.
struct BlockSystem {
  Index m = 1;
  std::size_t J = 1;
  std::function<VectorXd(const VectorXd&)> residual_fn;
  std::function<BlockJacobian(const VectorXd&)> jacobian_fn;

  Index block_size() const { return m; }
  std::size_t intervals() const { return J; }
  VectorXd residual(const VectorXd& v) const { return residual_fn(v); }
  BlockJacobian jacobian(const VectorXd& v) const { return jacobian_fn(v); }
};

struct NewtonOptions {
  double tol = 1e-6;
  std::size_t max_iter = 100;
  /// Step length multiplier; 1 is plain Newton.
  double damping = 1.0;
};

struct NewtonReport {
  std::size_t iterations = 0;  // linear solves performed
  double final_update_norm = 0.0;
  bool converged = false;
};

/// Mean absolute entry of an update vector.
inline double mean_abs(const VectorXd& v) { return v.cwiseAbs().sum() / static_cast<double>(v.size()); }

/// Plain Newton iteration stopped on the mean absolute update.  Systems may
/// provide `check_iterate(v)` to reject meaningless iterates by throwing.
template <BlockSystemLike System>
std::pair<VectorXd, NewtonReport> newton_solve(const System& sys, VectorXd v, const NewtonOptions& opts = {}) {
  const Index n = sys.block_size() * static_cast<Index>(sys.intervals() + 1);
  if (v.size() != n) throw std::invalid_argument("initial iterate has wrong dimension");
  if (!(opts.tol > 0.0)) throw std::invalid_argument("Newton tolerance must be positive");
  if (!(opts.damping > 0.0 && opts.damping <= 1.0)) throw std::invalid_argument("damping must lie in (0, 1]");

  NewtonReport report;
  while (report.iterations < opts.max_iter) {
    const VectorXd delta = opts.damping * solve_bordered_block(sys.jacobian(v), -sys.residual(v));
    v += delta;
    ++report.iterations;
    report.final_update_norm = mean_abs(delta);
    if constexpr (requires { sys.check_iterate(v); }) sys.check_iterate(v);
    if (report.final_update_norm <= opts.tol) {
      report.converged = true;
      return {std::move(v), report};
    }
  }
  throw MaxIterations(opts.max_iter);
}

/// Largest discrepancy between the analytic Jacobian and central finite
/// differences of the residual, each entry measured relative to max(1, |analytic|).
template <BlockSystemLike System>
double check_jacobian(const System& sys, const VectorXd& v) {
  const MatrixXd analytic = sys.jacobian(v).to_dense();
  double worst = 0.0;
  VectorXd probe = v;
  for (Index i = 0; i < v.size(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(v[i]));
    probe[i] = v[i] + h;
    const VectorXd up = sys.residual(probe);
    probe[i] = v[i] - h;
    const VectorXd down = sys.residual(probe);
    probe[i] = v[i];
    const VectorXd column = (up - down) / (2.0 * h);
    for (Index r = 0; r < column.size(); ++r) {
      const double a = analytic(r, i);
      worst = std::max(worst, std::abs(column[r] - a) / std::max(1.0, std::abs(a)));
    }
  }
  return worst;
}

}  // namespace oceanbvp
