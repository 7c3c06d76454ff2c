#include "oceanbvp/errors.hpp"
#include "oceanbvp/ivp.hpp"
#include "oceanbvp/model.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace oceanbvp;
using Scalar1 = Eigen::Matrix<double, 1, 1>;

namespace {

Scalar1 one(double x) { return Scalar1::Constant(x); }

auto decay = [](double, const Scalar1& y) -> Scalar1 { return -y; };

}  // namespace

TEST(Bs23, ExactForCubicQuadrature) {
  auto f = [](double t, const Scalar1&) -> Scalar1 { return one(t * t); };
  const auto step = step_bs23(f, 0.0, one(0.0), 1.0);
  EXPECT_NEAR(step.high[0], 1.0 / 3.0, 1e-15);
  EXPECT_EQ(step.evaluations, 4u);
  EXPECT_NEAR(step.slope_end[0], 1.0, 1e-15);
}

TEST(Bs23, FsalStepCostsThree) {
  const Scalar1 y = one(1.0);
  const auto step = step_bs23(decay, 0.0, y, 0.1, decay(0.0, y));
  EXPECT_EQ(step.evaluations, 3u);
  EXPECT_NEAR(step.high[0], std::exp(-0.1), 1e-5);
}

TEST(Ivp, ExponentialDecay) {
  const auto r = integrate(decay, 0.0, 1.0, one(1.0));
  EXPECT_NEAR(r.y[0], std::exp(-1.0), 1e-3 * std::exp(-1.0));
  EXPECT_GT(r.stats.accepted_steps, 0u);
}

TEST(Ivp, SampledLandsOnOutputPoints) {
  const std::vector<double> ts{0.25, 0.5, 1.0, 2.0};
  IvpOptions opts;
  opts.rel_tol = 1e-8;
  opts.abs_tol = 1e-10;
  const auto r = integrate_sampled(decay, 0.0, std::span<const double>(ts), one(1.0), opts);
  ASSERT_EQ(r.y.size(), ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) EXPECT_NEAR(r.y[i][0], std::exp(-ts[i]), 1e-7);
  const std::vector<double> bad{0.5, 0.25};
  EXPECT_THROW(integrate_sampled(decay, 0.0, std::span<const double>(bad), one(1.0)), std::invalid_argument);
}

TEST(Ivp, DenseOutputKeepsStepSequence) {
  const ModelParams p(2.0);
  auto f = [&](double t, const State3& u) { return rhs(t, u, p); };
  std::vector<double> ts;
  for (int i = 1; i <= 40; ++i) ts.push_back(0.25 * i);
  const State3 u0 = bc_initial(BcKind::Slip, 0.5289);
  const auto plain = integrate(f, 0.0, 10.0, u0);
  const auto dense = integrate_dense(f, 0.0, std::span<const double>(ts), u0);
  ASSERT_EQ(dense.y.size(), ts.size());
  EXPECT_EQ(dense.y.back(), plain.y);
  EXPECT_EQ(dense.stats, plain.stats);
}

TEST(Ivp, DenseOutputInterpolatesAccurately) {
  std::vector<double> ts;
  for (int i = 1; i <= 50; ++i) ts.push_back(0.1 * i);
  IvpOptions opts;
  opts.rel_tol = 1e-6;
  opts.abs_tol = 1e-9;
  const auto r = integrate_dense(decay, 0.0, std::span<const double>(ts), one(1.0), opts);
  for (std::size_t i = 0; i < ts.size(); ++i) EXPECT_NEAR(r.y[i][0], std::exp(-ts[i]), 1e-5);
}

TEST(Ivp, RejectsBadOptions) {
  IvpOptions opts;
  opts.rel_tol = 0.0;
  EXPECT_THROW(integrate(decay, 0.0, 1.0, one(1.0), opts), std::invalid_argument);
}

TEST(IvpProperty, EvaluationCountIdentity) {
  const ModelParams p(2.0);
  auto f = [&](double t, const State3& u) { return rhs(t, u, p); };
  for (double beta : {0.80, 0.8261, 0.85, 1.0}) {
    try {
      const auto r = integrate(f, 0.0, 10.0, bc_initial(BcKind::NoSlip, beta));
      const auto& s = r.stats;
      EXPECT_EQ(s.rhs_evaluations, 3 * (s.accepted_steps + s.rejected_steps) + 1);
    } catch (const Overflow&) {
    }
  }
}

TEST(IvpProperty, TighterToleranceIsMoreAccurateAndCostlier) {
  const ModelParams p(0.0);
  auto f = [&](double t, const State3& u) { return rhs(t, u, p); };
  const State3 exact = munk_exact(BcKind::NoSlip, 5.0);
  double prev_err = INFINITY;
  std::size_t prev_steps = 0;
  for (double tol : {1e-3, 1e-5, 1e-7, 1e-9}) {
    IvpOptions opts;
    opts.rel_tol = tol;
    opts.abs_tol = tol * 1e-3;
    const auto r = integrate(f, 0.0, 5.0, bc_initial(BcKind::NoSlip, 1.0), opts);
    const double err = (r.y - exact).cwiseAbs().maxCoeff();
    EXPECT_LT(err, prev_err) << "tol=" << tol;
    EXPECT_GT(r.stats.accepted_steps, prev_steps) << "tol=" << tol;
    prev_err = err;
    prev_steps = r.stats.accepted_steps;
  }
}

TEST(IvpProperty, Deterministic) {
  const ModelParams p(2.0);
  auto f = [&](double t, const State3& u) { return rhs(t, u, p); };
  const auto a = integrate(f, 0.0, 10.0, bc_initial(BcKind::Slip, 0.5289));
  const auto b = integrate(f, 0.0, 10.0, bc_initial(BcKind::Slip, 0.5289));
  EXPECT_EQ(a.y, b.y);
  EXPECT_EQ(a.stats, b.stats);
}

TEST(Ivp, AgreesWithFixedStepOracle) {
  const ModelParams p(2.0);
  auto f = [&](double t, const State3& u) { return rhs(t, u, p); };
  IvpOptions opts;
  opts.rel_tol = 1e-10;
  opts.abs_tol = 1e-12;
  const auto r = integrate(f, 0.0, 4.0, bc_initial(BcKind::NoSlip, 0.8261), opts);
  const auto ref = oracle::rk4_model(2.0, Eigen::Vector3d(0.0, 0.0, 0.8261), 4.0, 20000);
  EXPECT_LT((r.y - ref).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Ivp, WrongShotLeavesFarFieldOrOverflows) {
  const ModelParams p(2.0);
  auto f = [&](double t, const State3& u) { return rhs(t, u, p); };
  try {
    const auto r = integrate(f, 0.0, 10.0, bc_initial(BcKind::NoSlip, 2.0));
    EXPECT_GT(std::abs(r.y[0] - 1.0), 1.0);
  } catch (const Overflow& e) {
    EXPECT_GT(e.t_reached(), 0.0);
    EXPECT_LE(e.t_reached(), 10.0);
  }
}

TEST(Ivp, ReferenceShotReachesFarField) {
  const ModelParams p(2.0);
  auto f = [&](double t, const State3& u) { return rhs(t, u, p); };
  const auto r = integrate(f, 0.0, 10.0, bc_initial(BcKind::NoSlip, 0.826111));
  EXPECT_NEAR(r.y[0], 1.0, 5e-3);
}

TEST(Ivp, OverflowGuard) {
  auto grow = [](double, const Scalar1& y) -> Scalar1 { return 10.0 * y; };
  IvpOptions opts;
  opts.overflow_limit = 1e6;
  EXPECT_THROW(integrate(grow, 0.0, 10.0, one(1.0), opts), Overflow);
}

TEST(Ivp, StepCountLimit) {
  IvpOptions opts;
  opts.max_steps = 5;
  opts.rel_tol = 1e-10;
  opts.abs_tol = 1e-12;
  EXPECT_THROW(integrate(decay, 0.0, 100.0, one(1.0), opts), StepCountExceeded);
}
