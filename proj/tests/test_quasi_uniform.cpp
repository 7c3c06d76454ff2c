#include "oceanbvp/quasi_uniform.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace oceanbvp;

namespace {

QugProblem problem(BcKind kind, std::size_t J, double b = 2.0) {
  QugProblem p;
  p.params = ModelParams(b);
  p.kind = kind;
  p.J = J;
  return p;
}

}  // namespace

TEST(QuasiUniformGrid, NodePositions) {
  for (std::size_t J : {8u, 200u, 400u, 801u}) {
    for (double c : {1.0, 5.0, 7.5}) {
      const QuasiUniformGrid g(c, J);
      EXPECT_EQ(g.node(0).value(), 0.0);
      const double last = c * std::log(static_cast<double>(J));
      EXPECT_NEAR(g.node(J - 1).value(), last, 1e-12 * last);
      EXPECT_TRUE(g.node(J).is_infinite());
      if (J % 2 == 0) EXPECT_NEAR(g.node(J / 2).value(), c * std::log(2.0), 1e-12 * c);
      EXPECT_NEAR(g.map(0.5), c * std::log(2.0), 1e-14 * c);
    }
  }
}

TEST(QuasiUniformGrid, InfinityIsNotArithmetic) {
  const QuasiUniformGrid g(5.0, 10);
  EXPECT_THROW(g.node(10).value(), std::logic_error);
  EXPECT_THROW(g.node(11), std::out_of_range);
  EXPECT_THROW(g.fractional(10, 0.5), std::out_of_range);
  EXPECT_TRUE(std::isfinite(g.fractional(9, 0.75)));
  EXPECT_THROW(QuasiUniformGrid(0.0, 10), std::invalid_argument);
}

TEST(QuasiUniformGridProperty, NodesIncreaseAndFinite) {
  const QuasiUniformGrid g(5.0, 400);
  const auto xs = g.finite_nodes();
  ASSERT_EQ(xs.size(), 400u);
  for (std::size_t j = 1; j < xs.size(); ++j) EXPECT_GT(xs[j], xs[j - 1]);
}

TEST(QuasiUniformProperty, WeightsSumToOne) {
  const QuasiUniformGrid g(5.0, 200);
  for (bool freeze : {true, false}) {
    for (std::size_t j = 0; j < 200; ++j) {
      const auto k = interval_coefficients(g, j, freeze);
      EXPECT_EQ(k.b + k.c, 1.0) << "j=" << j;
      EXPECT_GT(k.a, 0.0);
      EXPECT_GE(k.b, 0.0);
      EXPECT_GE(k.c, 0.0);
    }
  }
}

TEST(QuasiUniform, CoefficientsByHand) {
  const double c = 5.0;
  const std::size_t J = 10;
  const QuasiUniformGrid g(c, J);
  auto x = [&](double s) { return -c * std::log(1.0 - s / J); };
  const auto k = interval_coefficients(g, 3);
  EXPECT_NEAR(k.a, 2.0 * (x(3.75) - x(3.25)), 1e-13);
  EXPECT_NEAR(k.b, (x(3.5) - x(3.0)) / (x(4.0) - x(3.0)), 1e-13);
  EXPECT_NEAR(k.c, (x(4.0) - x(3.5)) / (x(4.0) - x(3.0)), 1e-13);

  const auto frozen = interval_coefficients(g, J - 1, true);
  const auto prev = interval_coefficients(g, J - 2, true);
  EXPECT_EQ(frozen.b, prev.b);
  EXPECT_EQ(frozen.c, prev.c);
  EXPECT_NEAR(frozen.a, 2.0 * (x(9.75) - x(9.25)), 1e-12);
  const auto literal = interval_coefficients(g, J - 1, false);
  EXPECT_EQ(literal.b, 0.0);
  EXPECT_EQ(literal.c, 1.0);
}

TEST(QuasiUniform, MidpointHelpers) {
  const QuasiUniformGrid g(5.0, 10);
  const State3 a(1, 2, 3), b(3, 2, 1);
  const auto k = interval_coefficients(g, 2);
  EXPECT_LT((midpoint_value(a, b, g, 2) - (k.c * a + k.b * b)).norm(), 1e-15);
  EXPECT_LT((midpoint_derivative(a, b, g, 2) - (b - a) / k.a).norm(), 1e-15);
}

TEST(QuasiUniformProperty, FreezeReducesLastIntervalResidual) {
  // Exact linear solution sampled on the grid, infinity node = (1, 0, 0).
  for (auto kind : {BcKind::NoSlip, BcKind::Slip}) {
    for (std::size_t J : {50u, 100u, 200u}) {
      double last[2];
      for (int freeze = 0; freeze < 2; ++freeze) {
        auto p = problem(kind, J, 0.0);
        p.freeze_last = freeze == 1;
        const QugSystem sys(p);
        QugState v(3 * (J + 1));
        for (std::size_t j = 0; j < J; ++j)
          v.segment<3>(3 * j) = oracle::munk(kind == BcKind::NoSlip, sys.grid().node(j).value());
        v.tail<3>() = State3(1.0, 0.0, 0.0);
        last[freeze] = sys.residual(v).segment<3>(3 * (J - 1)).cwiseAbs().maxCoeff();
      }
      EXPECT_LT(last[1], last[0]) << to_string(kind) << " J=" << J;
    }
  }
}

TEST(QuasiUniformProperty, JacobianMatchesFiniteDifferences) {
  for (auto kind : {BcKind::NoSlip, BcKind::Slip}) {
    const auto p = problem(kind, 20);
    QugState v = qug_initial_guess(20);
    v += 0.1 * VectorXd::Random(v.size());
    EXPECT_LT(check_jacobian(QugSystem(p), v), 1e-5);
    const auto sol = solve_qug(p);
    EXPECT_LT(check_jacobian(QugSystem(p), sol.nodes), 1e-5);
  }
}

TEST(QuasiUniform, ReferenceValues) {
  struct Row {
    BcKind kind;
    std::size_t J;
    double beta;
    int iterations;
  };
  for (const Row& r : {Row{BcKind::NoSlip, 200, 0.826180, 5}, Row{BcKind::Slip, 200, 0.528927, 4},
                       Row{BcKind::NoSlip, 400, 0.826150, 5}, Row{BcKind::Slip, 400, 0.528922, 4}}) {
    const auto sol = solve_qug(problem(r.kind, r.J));
    EXPECT_NEAR(sol.mesh.beta, r.beta, 2e-5) << to_string(r.kind) << " J=" << r.J;
    EXPECT_LE(std::abs(static_cast<int>(sol.report.iterations) - r.iterations), 1);
  }
}

TEST(QuasiUniform, ValuesAtInfinity) {
  for (auto kind : {BcKind::NoSlip, BcKind::Slip}) {
    const auto sol = solve_qug(problem(kind, 200));
    ASSERT_TRUE(sol.mesh.at_infinity.has_value());
    EXPECT_NEAR((*sol.mesh.at_infinity)[0], 1.0, 1e-12);
    EXPECT_LT(std::abs((*sol.mesh.at_infinity)[1]), 1e-3);
    EXPECT_LT(std::abs((*sol.mesh.at_infinity)[2]), 1e-3);
    EXPECT_EQ(sol.mesh.xi.size(), 200u);
    EXPECT_FALSE(sol.mesh.free_boundary.has_value());
  }
}

TEST(QuasiUniformProperty, SecondOrderConvergence) {
  for (auto kind : {BcKind::NoSlip, BcKind::Slip}) {
    std::vector<double> betas;
    for (std::size_t J : {200u, 400u, 800u}) {
      auto p = problem(kind, J);
      p.tol = 1e-12;
      betas.push_back(solve_qug(p).mesh.beta);
    }
    const double ratio = std::abs(betas[0] - betas[1]) / std::abs(betas[1] - betas[2]);
    EXPECT_GE(ratio, 2.0) << to_string(kind);
    EXPECT_LE(ratio, 8.0) << to_string(kind);
  }
}

TEST(QuasiUniformProperty, LinearLimitMatchesClosedForm) {
  for (auto kind : {BcKind::NoSlip, BcKind::Slip}) {
    const auto sol = solve_qug(problem(kind, 400, 0.0));
    EXPECT_NEAR(sol.mesh.beta, 1.0, 1e-4);
    for (std::size_t j = 0; j < 400; j += 40)
      EXPECT_LT((sol.mesh.states[j] - oracle::munk(kind == BcKind::NoSlip, sol.mesh.xi[j])).cwiseAbs().maxCoeff(),
                1e-4);
  }
}
