#pragma once

// Free-boundary formulation.  The condition at infinity is replaced by
// u(xi_eps) = 1, u'(xi_eps) = eps at an unknown boundary xi_eps, which is
// carried as a fourth state component u4 with du4/dz = 0 after rescaling
// to z = xi / u4 in [0, 1].  The resulting problem is discretized with
// Keller's box scheme on a uniform z-mesh.

#include "oceanbvp/block_newton.hpp"
#include "oceanbvp/errors.hpp"
#include "oceanbvp/mesh_solution.hpp"
#include "oceanbvp/model.hpp"

#include <cstddef>
#include <exception>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace oceanbvp {

struct FbfProblem {
  ModelParams params;
  BcKind kind = BcKind::NoSlip;
  double eps = 1e-2;
  std::size_t J = 2000;
  double tol = 1e-6;
  std::size_t max_iter = 100;

  /// Solves need J >= 2; a single interval is still a valid residual.
  void validate(std::size_t min_intervals = 2) const {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
    if (J < min_intervals)
      throw std::invalid_argument("free-boundary mesh needs J >= " + std::to_string(min_intervals));
    if (!(tol > 0.0)) throw std::invalid_argument("Newton tolerance must be positive");
  }
};

/// Node values (u, u', u'', xi_eps) stacked for j = 0..J.
using FbfState = VectorXd;

inline constexpr Index kFbfBlock = 4;

class FbfSystem {
 public:
  explicit FbfSystem(FbfProblem prob) : prob_(std::move(prob)) { prob_.validate(1); }

  Index block_size() const { return kFbfBlock; }
  std::size_t intervals() const { return prob_.J; }
  double dz() const { return 1.0 / static_cast<double>(prob_.J); }
  const FbfProblem& problem() const { return prob_; }

  /// J interior blocks V_j - V_{j-1} - dz F((V_j + V_{j-1}) / 2), then the
  /// boundary rows u(0), u'(0) or u''(0), u(1) - 1, u'(1) - eps.
  VectorXd residual(const FbfState& v) const {
    check_size(v);
    const std::size_t J = prob_.J;
    VectorXd r(v.size());
    for (std::size_t j = 1; j <= J; ++j) {
      const auto prev = v.segment<kFbfBlock>(kFbfBlock * static_cast<Index>(j - 1));
      const auto cur = v.segment<kFbfBlock>(kFbfBlock * static_cast<Index>(j));
      const Eigen::Vector4d mid = 0.5 * (prev + cur);
      Eigen::Vector4d flux;
      flux.head<3>() = mid[3] * rhs(0.0, mid.head<3>(), prob_.params);
      flux[3] = 0.0;
      r.segment<kFbfBlock>(kFbfBlock * static_cast<Index>(j - 1)) = cur - prev - dz() * flux;
    }
    const auto first = v.head<kFbfBlock>();
    const auto last = v.tail<kFbfBlock>();
    auto bc = r.tail<kFbfBlock>();
    bc[0] = first[0];
    bc[1] = first[pinned_slot(prob_.kind)];
    bc[2] = last[0] - 1.0;
    bc[3] = last[1] - prob_.eps;
    return r;
  }

  BlockJacobian jacobian(const FbfState& v) const {
    check_size(v);
    const std::size_t J = prob_.J;
    const double half_dz = 0.5 * dz();
    BlockJacobian jac(kFbfBlock, J);
    for (std::size_t j = 1; j <= J; ++j) {
      const auto prev = v.segment<kFbfBlock>(kFbfBlock * static_cast<Index>(j - 1));
      const auto cur = v.segment<kFbfBlock>(kFbfBlock * static_cast<Index>(j));
      const Eigen::Vector4d mid = 0.5 * (prev + cur);
      const State3 u = mid.head<3>();

      Eigen::Matrix4d dflux = Eigen::Matrix4d::Zero();
      dflux.topLeftCorner<3, 3>() = mid[3] * rhs_jacobian(0.0, u, prob_.params);
      dflux.block<3, 1>(0, 3) = rhs(0.0, u, prob_.params);

      jac.lower[j - 1] = -Eigen::Matrix4d::Identity() - half_dz * dflux;
      jac.diag[j - 1] = Eigen::Matrix4d::Identity() - half_dz * dflux;
    }
    jac.boundary_first(0, 0) = 1.0;
    jac.boundary_first(1, pinned_slot(prob_.kind)) = 1.0;
    jac.boundary_last(2, 0) = 1.0;
    jac.boundary_last(3, 1) = 1.0;
    return jac;
  }

  void check_iterate(const FbfState& v) const {
    for (Index j = 0; j <= static_cast<Index>(prob_.J); ++j) {
      const double boundary = v[kFbfBlock * j + 3];
      if (!(boundary > 0.0)) throw NegativeFreeBoundary(boundary);
    }
  }

 private:
  void check_size(const FbfState& v) const {
    if (v.size() != kFbfBlock * static_cast<Index>(prob_.J + 1))
      throw std::invalid_argument("free-boundary state has wrong dimension");
  }

  FbfProblem prob_;
};

inline VectorXd fbf_residual(const FbfState& v, const FbfProblem& prob) { return FbfSystem(prob).residual(v); }

/// Starting iterate u = z, u' = z / 2, u'' = 1 - z with a constant free
/// boundary, 2 by default.
inline FbfState fbf_initial_guess(std::size_t J, double boundary = 2.0) {
  if (!(boundary > 0.0)) throw std::invalid_argument("initial free boundary must be positive");
  FbfState v(kFbfBlock * static_cast<Index>(J + 1));
  for (std::size_t j = 0; j <= J; ++j) {
    const double z = static_cast<double>(j) / static_cast<double>(J);
    v.segment<kFbfBlock>(kFbfBlock * static_cast<Index>(j)) << z, 0.5 * z, 1.0 - z, boundary;
  }
  return v;
}

struct FbfSolution {
  MeshSolution mesh;
  NewtonReport report;
  FbfState nodes;  // converged unknowns in z-form, reusable as a warm start
};

/// Maps converged z-mesh unknowns back to xi.
inline MeshSolution fbf_to_mesh(const FbfState& v, const FbfProblem& prob) {
  const std::size_t J = prob.J;
  MeshSolution mesh;
  const double boundary = v[kFbfBlock * static_cast<Index>(J) + 3];
  mesh.free_boundary = boundary;
  mesh.beta = v[missing_slot(prob.kind)];
  mesh.xi.reserve(J + 1);
  mesh.states.reserve(J + 1);
  for (std::size_t j = 0; j <= J; ++j) {
    const auto node = v.segment<kFbfBlock>(kFbfBlock * static_cast<Index>(j));
    mesh.xi.push_back(static_cast<double>(j) / static_cast<double>(J) * boundary);
    mesh.states.push_back(node.head<3>());
  }
  return mesh;
}

inline FbfSolution solve_fbf(const FbfProblem& prob, std::optional<FbfState> initial = std::nullopt) {
  prob.validate();
  const FbfSystem sys(prob);
  FbfState start = initial ? std::move(*initial) : fbf_initial_guess(prob.J);
  sys.check_iterate(start);
  NewtonOptions opts;
  opts.tol = prob.tol;
  opts.max_iter = prob.max_iter;
  auto [nodes, report] = newton_solve(sys, std::move(start), opts);
  FbfSolution out{fbf_to_mesh(nodes, prob), report, std::move(nodes)};
  return out;
}

struct ContinuationResult {
  std::vector<double> eps;           // values that were solved, in order
  std::vector<FbfSolution> solutions;
  std::exception_ptr failure;        // set when the sequence stopped early
  std::string failure_message;

  bool complete() const { return !failure; }
};

/// Solves for each eps in turn, warm-starting every solve after the first
/// from the previous converged nodes.  The first failure ends the sequence.
inline ContinuationResult continuation_solve(const FbfProblem& base, std::span<const double> eps_sequence) {
  for (std::size_t i = 0; i < eps_sequence.size(); ++i) {
    if (!(eps_sequence[i] > 0.0 && eps_sequence[i] < 1.0))
      throw std::invalid_argument("continuation values must lie in (0, 1)");
    if (i > 0 && !(eps_sequence[i] < eps_sequence[i - 1]))
      throw std::invalid_argument("continuation values must be strictly decreasing");
  }

  ContinuationResult out;
  std::optional<FbfState> warm;
  for (const double eps : eps_sequence) {
    FbfProblem prob = base;
    prob.eps = eps;
    try {
      FbfSolution sol = solve_fbf(prob, warm);
      warm = sol.nodes;
      out.eps.push_back(eps);
      out.solutions.push_back(std::move(sol));
    } catch (const SolverError& e) {
      out.failure = std::current_exception();
      out.failure_message = e.what();
      break;
    }
  }
  return out;
}

}  // namespace oceanbvp
