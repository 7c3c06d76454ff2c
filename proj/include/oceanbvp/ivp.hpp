#pragma once

// Adaptive Bogacki-Shampine 3(2) integrator with first-same-as-last reuse.
//
// Step control follows the classic ode23 driver: local extrapolation (the
// third-order solution is propagated), max-norm error with per-component
// weight max(|y_n|, |y_n+1|, abs_tol / rel_tol) measured against rel_tol,
// growth factor 0.8 * (rel_tol / err)^(1/3) capped at 5, and no growth right
// after a rejection.  A first rejection shrinks by at most a factor of two;
// repeated rejections of the same step halve it.

#include "oceanbvp/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace oceanbvp {

struct IvpOptions {
  double rel_tol = 1e-3;
  double abs_tol = 1e-6;
  std::size_t max_steps = 1'000'000;
  std::optional<double> initial_step;
  /// Upper bound on |h|; defaults to a tenth of the integration span.
  std::optional<double> max_step;
  /// Any state component beyond this magnitude aborts with Overflow.
  double overflow_limit = 1e12;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
      throw std::invalid_argument("IVP tolerances must be positive");
    if (initial_step && !(*initial_step > 0.0))
      throw std::invalid_argument("initial step must be positive");
    if (max_step && !(*max_step > 0.0))
      throw std::invalid_argument("max step must be positive");
  }
};

struct IvpStats {
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  std::size_t rhs_evaluations = 0;

  IvpStats& operator+=(const IvpStats& other) {
    accepted_steps += other.accepted_steps;
    rejected_steps += other.rejected_steps;
    rhs_evaluations += other.rhs_evaluations;
    return *this;
  }

  friend bool operator==(const IvpStats&, const IvpStats&) = default;
};

template <class State>
struct IvpResult {
  State y;
  IvpStats stats;
};

template <class State>
struct SampledIvpResult {
  std::vector<State> y;  // one entry per requested output point
  IvpStats stats;
};

template <class State>
struct Bs23Step {
  State low;       // second-order solution
  State high;      // third-order solution
  State slope_end; // f(t + h, high), reused as the next first stage
  int evaluations = 0;
};

namespace bs23 {
inline constexpr double a21 = 1.0 / 2.0;
inline constexpr double a32 = 3.0 / 4.0;
inline constexpr double b1 = 2.0 / 9.0;
inline constexpr double b2 = 1.0 / 3.0;
inline constexpr double b3 = 4.0 / 9.0;
// Second-order weights (includes the FSAL stage).
inline constexpr double d1 = 7.0 / 24.0;
inline constexpr double d2 = 1.0 / 4.0;
inline constexpr double d3 = 1.0 / 3.0;
inline constexpr double d4 = 1.0 / 8.0;
}  // namespace bs23

/// One embedded step with a known first stage `k1 = f(t, y)`.
template <class State, class Rhs>
Bs23Step<State> step_bs23(Rhs&& f, double t, const State& y, double h, const State& k1) {
  using namespace bs23;
  const State k2 = f(t + a21 * h, State(y + (a21 * h) * k1));
  const State k3 = f(t + a32 * h, State(y + (a32 * h) * k2));
  State high = y + h * (b1 * k1 + b2 * k2 + b3 * k3);
  State k4 = f(t + h, high);
  State low = y + h * (d1 * k1 + d2 * k2 + d3 * k3 + d4 * k4);
  return {std::move(low), std::move(high), std::move(k4), 3};
}

/// One embedded step from scratch (four evaluations).
template <class State, class Rhs>
Bs23Step<State> step_bs23(Rhs&& f, double t, const State& y, double h) {
  const State k1 = f(t, y);
  auto step = step_bs23(f, t, y, h, k1);
  step.evaluations += 1;
  return step;
}

namespace detail {

// Weighted error relative to rel_tol; a step is acceptable when this is <= 1.
template <class State>
double scaled_error(const State& err, const State& y0, const State& y1, const IvpOptions& opts) {
  const double threshold = opts.abs_tol / opts.rel_tol;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double weight = std::max({std::abs(y0[i]), std::abs(y1[i]), threshold});
    worst = std::max(worst, std::abs(err[i]) / weight);
  }
  return worst / opts.rel_tol;
}

template <class State>
bool out_of_range(const State& y, double limit) {
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (!std::isfinite(y[i]) || std::abs(y[i]) > limit) return true;
  return false;
}

// Starting step from the scaled size of the initial slope.
template <class State>
double initial_step(const State& y0, const State& f0, double span, double hmax, const IvpOptions& opts) {
  double h = std::min(hmax, span);
  const double threshold = opts.abs_tol / opts.rel_tol;
  double rh = 0.0;
  for (Eigen::Index i = 0; i < y0.size(); ++i)
    rh = std::max(rh, std::abs(f0[i]) / std::max(std::abs(y0[i]), threshold));
  rh /= 0.8 * std::cbrt(opts.rel_tol);
  if (h * rh > 1.0) h = 1.0 / rh;
  return h;
}

// Cubic Hermite interpolant across one accepted step.
template <class State>
State hermite(double t0, const State& y0, const State& f0, double t1, const State& y1, const State& f1, double t) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * f0 + (3 * s2 - 2 * s3) * y1 + (s3 - s2) * h * f1;
}

// Integrates through each point of `stops` (strictly increasing, all > t0)
// and records the state there.  With `dense` only the last stop is landed on
// and the others are interpolated, so the step sequence is the one a plain
// integration to the last stop would take.
template <class State, class Rhs>
SampledIvpResult<State> integrate_core(Rhs&& f, double t0, const State& y0, std::span<const double> stops,
                                       const IvpOptions& opts, bool dense = false) {
  opts.validate();
  if (stops.empty()) throw std::invalid_argument("no output points");
  const double t_end = stops.back();
  if (!(t_end > t0)) throw std::invalid_argument("integration requires t_end > t0");
  if (out_of_range(y0, opts.overflow_limit)) throw Overflow(t0);

  constexpr double third = 1.0 / 3.0;
  const double span = t_end - t0;
  const double hmax = opts.max_step.value_or(0.1 * span);

  SampledIvpResult<State> out;
  out.y.reserve(stops.size());
  IvpStats& stats = out.stats;

  double t = t0;
  State y = y0;
  State k1 = f(t, y);
  stats.rhs_evaluations = 1;

  double h = opts.initial_step ? std::min(*opts.initial_step, hmax) : initial_step(y, k1, span, hmax, opts);
  std::size_t next = 0;

  while (next < stops.size()) {
    const double stop = dense ? t_end : stops[next];
    const double hmin = 16.0 * std::numeric_limits<double>::epsilon() * std::abs(t);
    h = std::clamp(h, hmin, hmax);
    bool lands = false;
    if (1.1 * h >= stop - t) {
      h = stop - t;
      lands = true;
    }

    bool rejected = false;
    for (;;) {
      if (stats.accepted_steps + stats.rejected_steps >= opts.max_steps) throw StepCountExceeded(opts.max_steps);
      auto step = step_bs23(f, t, y, h, k1);
      stats.rhs_evaluations += static_cast<std::size_t>(step.evaluations);
      const double err = scaled_error(State(step.high - step.low), y, step.high, opts);

      if (std::isfinite(err) && err <= 1.0) {
        ++stats.accepted_steps;
        const double t_prev = t;
        t = lands ? stop : t + h;
        if (dense) {
          for (; next + 1 < stops.size() && stops[next] <= t; ++next)
            out.y.push_back(hermite(t_prev, y, k1, t, State(step.high), State(step.slope_end), stops[next]));
        }
        y = std::move(step.high);
        k1 = std::move(step.slope_end);
        if (out_of_range(y, opts.overflow_limit)) throw Overflow(t);
        if (!rejected) {
          const double factor = err == 0.0 ? 5.0 : 0.8 * std::pow(err, -third);
          h *= std::min(factor, 5.0);
        }
        break;
      }

      ++stats.rejected_steps;
      if (h <= hmin) throw StepSizeUnderflow(t);
      const double factor = !rejected && std::isfinite(err) ? std::max(0.5, 0.8 * std::pow(err, -third)) : 0.5;
      h = std::max(hmin, h * factor);
      lands = false;
      rejected = true;
    }

    if (lands) {
      out.y.push_back(y);
      ++next;
    }
  }
  return out;
}

}  // namespace detail

/// Integrates y' = f(t, y) from t0 to t_end.
template <class State, class Rhs>
IvpResult<State> integrate(Rhs&& f, double t0, double t_end, const State& y0, const IvpOptions& opts = {}) {
  const double stop[] = {t_end};
  auto sampled = detail::integrate_core(f, t0, y0, std::span<const double>(stop), opts);
  return {std::move(sampled.y.front()), sampled.stats};
}

/// Integrates through the increasing output points `ts` (all > t0), landing
/// on each one; the step sequence is otherwise the adaptive one.
template <class State, class Rhs>
SampledIvpResult<State> integrate_sampled(Rhs&& f, double t0, std::span<const double> ts, const State& y0,
                                          const IvpOptions& opts = {}) {
  for (std::size_t i = 0; i < ts.size(); ++i)
    if (!(ts[i] > (i == 0 ? t0 : ts[i - 1])))
      throw std::invalid_argument("output points must be strictly increasing and after t0");
  return detail::integrate_core(f, t0, y0, ts, opts);
}

/// Like `integrate_sampled`, but the interior output points are interpolated
/// rather than landed on, leaving the step sequence of a plain integration to
/// ts.back() unchanged.
template <class State, class Rhs>
SampledIvpResult<State> integrate_dense(Rhs&& f, double t0, std::span<const double> ts, const State& y0,
                                        const IvpOptions& opts = {}) {
  for (std::size_t i = 0; i < ts.size(); ++i)
    if (!(ts[i] > (i == 0 ? t0 : ts[i - 1])))
      throw std::invalid_argument("output points must be strictly increasing and after t0");
  return detail::integrate_core(f, t0, y0, ts, opts, true);
}

}  // namespace oceanbvp
