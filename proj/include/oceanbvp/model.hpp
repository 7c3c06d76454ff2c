#pragma once

// Western boundary-layer model of the wind-driven ocean circulation:
//
//   u''' = b (u'^2 - u u'') + u - 1,   xi in [0, inf),   u(inf) = 1,
//
// with either no-slip (u(0) = u'(0) = 0) or slip (u(0) = u''(0) = 0) data
// at the coast.  State vectors are (u, u', u'').

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace oceanbvp {

using State3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;

/// (u, u', u'') followed by their derivatives with respect to the missing
/// initial value beta.
using State6 = Eigen::Matrix<double, 6, 1>;

enum class BcKind { NoSlip, Slip };

inline std::string_view to_string(BcKind kind) {
  return kind == BcKind::NoSlip ? "no-slip" : "slip";
}

inline BcKind parse_bc_kind(std::string_view text) {
  if (text == "no-slip" || text == "noslip" || text == "rigid") return BcKind::NoSlip;
  if (text == "slip" || text == "stress-free" || text == "slippery") return BcKind::Slip;
  throw std::invalid_argument("unknown boundary condition kind: " + std::string(text));
}

/// Index of the state component that holds the missing initial condition:
/// u'' for no-slip, u' for slip.
constexpr int missing_slot(BcKind kind) { return kind == BcKind::NoSlip ? 2 : 1; }

/// Index of the state component pinned to zero at the coast besides u itself.
constexpr int pinned_slot(BcKind kind) { return kind == BcKind::NoSlip ? 1 : 2; }

struct ModelParams {
  double b = 2.0;

  ModelParams() = default;
  explicit ModelParams(double strength) : b(strength) {
    if (!std::isfinite(b) || b < 0.0)
      throw std::invalid_argument("nonlinearity strength b must be finite and non-negative");
  }

  /// Collapse the inertial (gamma) and viscous (kappa) layer widths into b.
  static ModelParams from_physical(double gamma, double kappa) {
    if (!(gamma > 0.0) || !(kappa > 0.0))
      throw std::invalid_argument("gamma and kappa must be positive");
    return ModelParams(std::numbers::pi * std::cbrt(gamma / (kappa * kappa)));
  }
};

/// Right-hand side of the first-order system.  Autonomous; xi is unused.
inline State3 rhs(double /*xi*/, const State3& u, const ModelParams& p) {
  return {u[1], u[2], p.b * (u[1] * u[1] - u[0] * u[2]) + u[0] - 1.0};
}

inline Matrix3 rhs_jacobian(double /*xi*/, const State3& u, const ModelParams& p) {
  Matrix3 jac;
  jac << 0.0, 1.0, 0.0,
         0.0, 0.0, 1.0,
         1.0 - p.b * u[2], 2.0 * p.b * u[1], -p.b * u[0];
  return jac;
}

/// Base system augmented with its beta-sensitivities.
inline State6 rhs_variational(double xi, const State6& y, const ModelParams& p) {
  const State3 base = y.head<3>();
  const State3 s = y.tail<3>();
  State6 out;
  out.head<3>() = rhs(xi, base, p);
  out[3] = s[1];
  out[4] = s[2];
  out[5] = p.b * (2.0 * base[1] * s[1] - base[2] * s[0] - base[0] * s[2]) + s[0];
  return out;
}

/// Initial state of the trial IVP with beta in the missing slot.
inline State3 bc_initial(BcKind kind, double beta) {
  State3 u = State3::Zero();
  u[missing_slot(kind)] = beta;
  return u;
}

/// Initial state of the augmented IVP: the sensitivity block is the unit
/// vector in the missing slot.
inline State6 bc_initial_variational(BcKind kind, double beta) {
  State6 y = State6::Zero();
  y[missing_slot(kind)] = beta;
  y[3 + missing_slot(kind)] = 1.0;
  return y;
}

enum class Branch { Principal, Secondary };

/// Closed-form approximation of the missing initial condition as a function
/// of b.  The principal branch takes the "+" sign in the denominator.  The
/// secondary branch is reported for completeness; it returns NaN where it has
/// no real value (always for no-slip with b > 0).
inline double approx_missing_init(BcKind kind, double b, Branch branch = Branch::Principal) {
  const double sign = branch == Branch::Principal ? 1.0 : -1.0;
  if (kind == BcKind::NoSlip) {
    const double squared = 2.0 / (1.0 + sign * std::sqrt(1.0 + 4.0 * b / 3.0));
    return squared >= 0.0 ? std::sqrt(squared) : std::numeric_limits<double>::quiet_NaN();
  }
  return 2.0 / (1.0 + sign * std::sqrt(1.0 + 10.0 * b / 3.0));
}

/// Bounded solution of the linear (b = 0) model
///   u = 1 + exp(s xi) (A cos(w xi) + B sin(w xi)),
/// where s +- i w are the decaying roots of r^3 = 1.
class MunkSolution {
 public:
  explicit MunkSolution(BcKind kind) {
    // Pick the cube roots of unity with negative real part.
    const std::complex<double> root = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
    decay_ = root.real();
    freq_ = std::abs(root.imag());

    // Each derivative maps the coefficient pair linearly: (A, B) -> D (A, B).
    Eigen::Matrix2d d;
    d << decay_, freq_,
         -freq_, decay_;
    // u(0) = 0 fixes A = -1; the second condition pins one derivative at 0.
    const Eigen::Matrix2d dk = kind == BcKind::NoSlip ? d : Eigen::Matrix2d(d * d);
    Eigen::Matrix2d conditions;
    conditions.row(0) << 1.0, 0.0;
    conditions.row(1) = dk.row(0);
    coeffs_ = conditions.partialPivLu().solve(Eigen::Vector2d(-1.0, 0.0));
  }

  double a() const { return coeffs_[0]; }
  double b() const { return coeffs_[1]; }

  /// (u, u', u'') at xi; derivatives of any order via `derivative`.
  State3 operator()(double xi) const {
    return {1.0 + derivative(0, xi), derivative(1, xi), derivative(2, xi)};
  }

  /// k-th derivative of the decaying part.
  double derivative(int k, double xi) const {
    Eigen::Vector2d c = coeffs_;
    Eigen::Matrix2d d;
    d << decay_, freq_,
         -freq_, decay_;
    for (int i = 0; i < k; ++i) c = d * c;
    return std::exp(decay_ * xi) * (c[0] * std::cos(freq_ * xi) + c[1] * std::sin(freq_ * xi));
  }

 private:
  double decay_ = 0.0;
  double freq_ = 0.0;
  Eigen::Vector2d coeffs_;
};

inline State3 munk_exact(BcKind kind, double xi) {
  if (std::isinf(xi)) return {1.0, 0.0, 0.0};
  return MunkSolution(kind)(xi);
}

}  // namespace oceanbvp
