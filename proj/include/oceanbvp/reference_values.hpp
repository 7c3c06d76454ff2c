#pragma once

// Reference results for the model at b = 2 together with the
// tolerances used to judge a reproduction.  The CLI's `tables` command and
// the acceptance suite both read from here.

#include "oceanbvp/model.hpp"

#include <array>
#include <cstddef>
#include <optional>

namespace oceanbvp::reference {

inline constexpr double kStrength = 2.0;

struct Tolerance {
  double beta;
  std::size_t iterations;  // allowed |iterations - reference|
  double boundary = 0.0;   // free boundary, 0 when not compared
};

inline constexpr Tolerance kShooting{5e-4, 2};
inline constexpr Tolerance kFreeBoundary{2e-5, 1, 1e-4};
inline constexpr Tolerance kQuasiUniform{2e-5, 1};
inline constexpr double kApproximation = 5e-7;
inline constexpr double kMunk = 1e-4;

/// Shooting with xi_inf = 10 and TOL = 1e-6.
struct ShootingCase {
  BcKind kind;
  bool newton;
  double beta0;
  std::optional<double> beta1;
  std::size_t iterations;
  double beta;
  // Cost of the whole solve.
  std::size_t steps;
  std::size_t rejections;
  std::size_t evaluations;
};

inline constexpr std::array<ShootingCase, 4> kShootingCases{{
    {BcKind::NoSlip, false, 1.0, 2.0, 12, 0.826111, 109111, 142, 327771},
    {BcKind::NoSlip, true, 1.0, std::nullopt, 7, 0.826111, 1489, 79, 4711},
    {BcKind::Slip, false, 0.8, 1.0, 13, 0.528885, 28461, 208, 86020},
    {BcKind::Slip, true, 0.8, std::nullopt, 8, 0.528910, 6263, 114, 19139},
}};

/// Free-boundary formulation, J = 2000, TOL = 1e-6, default starting iterate.
struct FreeBoundaryCase {
  BcKind kind;
  double eps;
  double boundary;
  std::size_t iterations;
  double beta;
};

inline constexpr std::array<FreeBoundaryCase, 8> kFreeBoundaryCases{{
    {BcKind::NoSlip, 1e-2, 6.485761, 7, 0.826184},
    {BcKind::NoSlip, 1e-3, 8.792991, 8, 0.826141},
    {BcKind::NoSlip, 1e-4, 11.098635, 10, 0.826141},
    {BcKind::NoSlip, 1e-5, 13.402219, 11, 0.826142},
    {BcKind::Slip, 1e-2, 5.828307, 7, 0.528970},
    {BcKind::Slip, 1e-3, 8.132813, 8, 0.528922},
    {BcKind::Slip, 1e-4, 10.437875, 9, 0.528921},
    {BcKind::Slip, 1e-5, 12.741323, 11, 0.528921},
}};

/// Iterations of the warm-started sweep after its first value.
inline constexpr std::array<double, 4> kContinuationEps{1e-2, 1e-3, 1e-4, 1e-5};
inline constexpr std::array<std::size_t, 3> kContinuationWarmIterations{6, 6, 6};
inline constexpr std::size_t kContinuationFirstIterations = 7;

enum class RowMethod { ShootSecant, ShootNewton, FreeBoundary, QuasiUniform };

/// One row of the cross-method comparison (b = 2).
struct ComparisonCase {
  RowMethod method;
  std::size_t grid_points;  // 0 for shooting
  std::optional<double> boundary;
  std::size_t iterations;
  double beta;
};

struct ComparisonTableCase {
  BcKind kind;
  double approximation;  // closed-form estimate printed in the caption
  std::array<ComparisonCase, 6> rows;
};

inline constexpr std::array<ComparisonTableCase, 2> kComparison{{
    {BcKind::NoSlip,
     0.828336,
     {{
         {RowMethod::ShootSecant, 0, 10.0, 12, 0.826111},
         {RowMethod::ShootNewton, 0, 10.0, 7, 0.826111},
         {RowMethod::FreeBoundary, 2000, 13.402219, 11, 0.826142},
         {RowMethod::FreeBoundary, 4000, 13.402251, 11, 0.826140},
         {RowMethod::QuasiUniform, 200, std::nullopt, 5, 0.826180},
         {RowMethod::QuasiUniform, 400, std::nullopt, 5, 0.826150},
     }}},
    {BcKind::Slip,
     0.530662,
     {{
         {RowMethod::ShootSecant, 0, 10.0, 13, 0.528885},
         {RowMethod::ShootNewton, 0, 10.0, 8, 0.528910},
         {RowMethod::FreeBoundary, 2000, 12.741323, 11, 0.528921},
         {RowMethod::FreeBoundary, 4000, 12.741353, 11, 0.528921},
         {RowMethod::QuasiUniform, 200, std::nullopt, 4, 0.528927},
         {RowMethod::QuasiUniform, 400, std::nullopt, 4, 0.528922},
     }}},
}};

inline constexpr Tolerance tolerance_for(RowMethod m) {
  switch (m) {
    case RowMethod::ShootSecant:
    case RowMethod::ShootNewton:
      return kShooting;
    case RowMethod::FreeBoundary:
      return kFreeBoundary;
    case RowMethod::QuasiUniform:
      return kQuasiUniform;
  }
  return kShooting;
}

/// Reference cost counts are only comparable up to a factor of ten.
inline constexpr double kCostFactor = 10.0;

inline bool within_order_of_magnitude(double value, double reference) {
  return value >= reference / kCostFactor && value <= reference * kCostFactor;
}

inline bool iterations_match(std::size_t value, std::size_t reference, std::size_t slack) {
  return (value > reference ? value - reference : reference - value) <= slack;
}

}  // namespace oceanbvp::reference
