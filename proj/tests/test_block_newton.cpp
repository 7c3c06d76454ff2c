#include "oceanbvp/block_newton.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace oceanbvp;

namespace {

BlockJacobian random_jacobian(std::mt19937& rng, Index m, std::size_t J) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  auto rnd = [&](Index r, Index c) {
    MatrixXd a(r, c);
    for (Index i = 0; i < r; ++i)
      for (Index j = 0; j < c; ++j) a(i, j) = dist(rng);
    return a;
  };
  BlockJacobian jac(m, J);
  for (std::size_t j = 0; j < J; ++j) {
    jac.lower[j] = rnd(m, m);
    jac.diag[j] = rnd(m, m);
  }
  // Split the boundary rows between the two ends at random.
  jac.boundary_first = rnd(m, m);
  jac.boundary_last = rnd(m, m);
  return jac;
}

// Dense assembly written independently of the library's own layout helper.
MatrixXd assemble(const BlockJacobian& jac) {
  const Index m = jac.block_size;
  const auto J = static_cast<Index>(jac.lower.size());
  MatrixXd a = MatrixXd::Zero(m * (J + 1), m * (J + 1));
  for (Index j = 0; j < J; ++j) {
    for (Index r = 0; r < m; ++r)
      for (Index c = 0; c < m; ++c) {
        a(j * m + r, j * m + c) = jac.lower[j](r, c);
        a(j * m + r, (j + 1) * m + c) = jac.diag[j](r, c);
      }
  }
  for (Index r = 0; r < m; ++r)
    for (Index c = 0; c < m; ++c) {
      a(J * m + r, c) += jac.boundary_first(r, c);
      a(J * m + r, J * m + c) += jac.boundary_last(r, c);
    }
  return a;
}

// Affine system r(v) = A v - g with A a block layout.
BlockSystem affine_system(const BlockJacobian& jac, const VectorXd& g) {
  BlockSystem s;
  s.m = jac.block_size;
  s.J = jac.intervals();
  const MatrixXd a = assemble(jac);
  s.residual_fn = [a, g](const VectorXd& v) -> VectorXd { return a * v - g; };
  s.jacobian_fn = [jac](const VectorXd&) { return jac; };
  return s;
}

}  // namespace

TEST(BlockJacobianLayout, DenseMatchesIndependentAssembly) {
  std::mt19937 rng(3);
  const auto jac = random_jacobian(rng, 3, 4);
  EXPECT_EQ(jac.to_dense(), assemble(jac));
}

TEST(BlockSolveProperty, MatchesDenseOracle) {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> pick_m(1, 4), pick_j(1, 12);
  int checked = 0;
  while (checked < 50) {
    const Index m = pick_m(rng);
    const auto J = static_cast<std::size_t>(pick_j(rng));
    const auto jac = random_jacobian(rng, m, J);
    const MatrixXd a = assemble(jac);
    Eigen::FullPivLU<MatrixXd> lu(a);
    if (lu.rank() < a.rows() || lu.rcond() < 1e-8) continue;
    const VectorXd rhs = VectorXd::Random(a.rows());
    const VectorXd want = a.partialPivLu().solve(rhs);
    VectorXd got;
    try {
      got = solve_bordered_block(jac, rhs);
    } catch (const SingularJacobian&) {
      // A structurally singular stage for a non-singular matrix is a failure.
      ADD_FAILURE() << "stage pivot breakdown m=" << m << " J=" << J;
      ++checked;
      continue;
    }
    EXPECT_LT((got - want).cwiseAbs().maxCoeff() / std::max(1.0, want.cwiseAbs().maxCoeff()), 1e-10)
        << "m=" << m << " J=" << J;
    ++checked;
  }
}

TEST(BlockSolve, SingleInterval) {
  BlockJacobian jac(2, 1);
  jac.lower[0] << 1, 0, 0, 1;
  jac.diag[0] << -1, 0, 0, -1;
  jac.boundary_first << 1, 0, 0, 0;
  jac.boundary_last << 0, 0, 0, 1;
  VectorXd rhs(4);
  rhs << 0, 0, 2, 3;
  const VectorXd x = solve_bordered_block(jac, rhs);
  const VectorXd want = assemble(jac).fullPivLu().solve(rhs);
  EXPECT_LT((x - want).norm(), 1e-14);
}

TEST(BlockSolve, SingularRaises) {
  BlockJacobian jac(2, 2);  // all blocks zero
  EXPECT_THROW(solve_bordered_block(jac, VectorXd::Ones(6)), SingularJacobian);
}

TEST(BlockSolve, RejectsWrongSize) {
  BlockJacobian jac(2, 2);
  EXPECT_THROW(solve_bordered_block(jac, VectorXd::Ones(5)), std::invalid_argument);
}

TEST(BlockNewtonProperty, AffineSystemConvergesInOneStepPlusCheck) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    auto jac = random_jacobian(rng, 3, 6);
    for (auto& d : jac.diag) d += 4.0 * MatrixXd::Identity(3, 3);
    const MatrixXd a = assemble(jac);
    if (Eigen::FullPivLU<MatrixXd>(a).rcond() < 1e-6) continue;
    const VectorXd g = VectorXd::Random(a.rows());
    const auto sys = affine_system(jac, g);
    NewtonOptions opts;
    opts.tol = 1e-10;
    const auto [v, report] = newton_solve(sys, VectorXd::Zero(a.rows()), opts);
    // The first update solves the system; the second confirms it.
    EXPECT_LE(report.iterations, 2u);
    EXPECT_TRUE(report.converged);
    EXPECT_LT(sys.residual(v).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT(check_jacobian(sys, v), 1e-8);
  }
}

TEST(BlockNewton, ScalarQuadraticPerBlock) {
  // v_{j+1} - v_j = 0, v_0^2 = 4 with v_0 > 0: every node converges to 2.
  const std::size_t J = 5;
  BlockSystem s;
  s.m = 1;
  s.J = J;
  s.residual_fn = [J](const VectorXd& v) {
    VectorXd r(J + 1);
    for (std::size_t j = 0; j < J; ++j) r[j] = v[j + 1] - v[j];
    r[J] = v[0] * v[0] - 4.0;
    return r;
  };
  s.jacobian_fn = [J](const VectorXd& v) {
    BlockJacobian jac(1, J);
    for (std::size_t j = 0; j < J; ++j) {
      jac.lower[j](0, 0) = -1.0;
      jac.diag[j](0, 0) = 1.0;
    }
    jac.boundary_first(0, 0) = 2.0 * v[0];
    return jac;
  };
  NewtonOptions opts;
  opts.tol = 1e-12;
  const auto [v, report] = newton_solve(s, VectorXd::Constant(J + 1, 3.0), opts);
  EXPECT_TRUE(report.converged);
  EXPECT_LT((v.array() - 2.0).abs().maxCoeff(), 1e-12);
  EXPECT_LT(s.residual(v).cwiseAbs().maxCoeff(), 10 * opts.tol);
  EXPECT_LT(check_jacobian(s, v), 1e-8);

  opts.max_iter = 1;
  EXPECT_THROW(newton_solve(s, VectorXd::Constant(J + 1, 3.0), opts), MaxIterations);
}

TEST(BlockNewton, MeanAbs) {
  VectorXd v(4);
  v << 1, -2, 3, -4;
  EXPECT_DOUBLE_EQ(mean_abs(v), 2.5);
}
