#pragma once

// Batch driver: runs one solver from a configuration, rebuilds the
// cross-method comparison tables, and sweeps the nonlinearity strength.

#include "oceanbvp/free_boundary.hpp"
#include "oceanbvp/quasi_uniform.hpp"
#include "oceanbvp/reference_values.hpp"
#include "oceanbvp/shooting.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace oceanbvp {

enum class Method { ShootSecant, ShootNewton, Fbf, FbfContinuation, Qug };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::ShootSecant: return "shoot-secant";
    case Method::ShootNewton: return "shoot-newton";
    case Method::Fbf: return "fbf";
    case Method::FbfContinuation: return "fbf-continuation";
    case Method::Qug: return "qug";
  }
  return "?";
}

/// Usage problems in a run configuration (as opposed to solver failures).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline Method parse_method(std::string_view text) {
  for (Method m : {Method::ShootSecant, Method::ShootNewton, Method::Fbf, Method::FbfContinuation, Method::Qug})
    if (text == to_string(m)) return m;
  throw ConfigError("unknown method: " + std::string(text));
}

inline bool is_shooting(Method m) { return m == Method::ShootSecant || m == Method::ShootNewton; }
inline bool is_free_boundary(Method m) { return m == Method::Fbf || m == Method::FbfContinuation; }

struct RunConfig {
  Method method = Method::Qug;
  BcKind kind = BcKind::NoSlip;
  double b = reference::kStrength;
  std::optional<double> beta0;
  std::optional<double> beta1;
  std::optional<double> xi_inf;
  std::vector<double> eps;
  std::optional<std::size_t> J;
  std::optional<double> c;
  std::optional<double> tol;

  /// Every knob must belong to the chosen method.
  void validate() const {
    const auto reject = [this](std::string_view knob) {
      throw ConfigError(std::string(knob) + " does not apply to method " + std::string(to_string(method)));
    };
    if (!std::isfinite(b) || b < 0.0) throw ConfigError("--b must be finite and non-negative");
    if (is_shooting(method)) {
      if (!beta0) throw ConfigError("--beta0 is required for shooting");
      if (method == Method::ShootSecant && !beta1) throw ConfigError("--beta1 is required for shoot-secant");
      if (method != Method::ShootSecant && beta1) reject("--beta1");
      if (xi_inf && !(*xi_inf > 0.0)) throw ConfigError("--xi-inf must be positive");
      if (!eps.empty()) reject("--eps");
      if (J) reject("--J");
      if (c) reject("--c");
    } else {
      if (beta0) reject("--beta0");
      if (beta1) reject("--beta1");
      if (xi_inf) reject("--xi-inf");
    }
    if (is_free_boundary(method)) {
      if (eps.empty()) throw ConfigError("--eps is required for the free-boundary methods");
      if (method == Method::Fbf && eps.size() != 1) throw ConfigError("fbf takes exactly one --eps");
      for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0.0 && eps[i] < 1.0)) throw ConfigError("--eps values must lie in (0, 1)");
        if (i > 0 && !(eps[i] < eps[i - 1])) throw ConfigError("--eps values must be strictly decreasing");
      }
      if (c) reject("--c");
      if (J && *J < 2) throw ConfigError("--J must be at least 2");
    }
    if (method == Method::Qug) {
      if (!eps.empty()) reject("--eps");
      if (c && !(*c > 0.0)) throw ConfigError("--c must be positive");
      if (J && *J < 3) throw ConfigError("--J must be at least 3");
    }
    if (tol && !(*tol > 0.0)) throw ConfigError("--tol must be positive");
  }

  ShootingProblem shooting_problem() const {
    ShootingProblem p;
    p.params = ModelParams(b);
    p.kind = kind;
    if (xi_inf) p.xi_infinity = *xi_inf;
    if (tol) p.tol = *tol;
    return p;
  }

  FbfProblem fbf_problem(double eps_value) const {
    FbfProblem p;
    p.params = ModelParams(b);
    p.kind = kind;
    p.eps = eps_value;
    if (J) p.J = *J;
    if (tol) p.tol = *tol;
    return p;
  }

  QugProblem qug_problem() const {
    QugProblem p;
    p.params = ModelParams(b);
    p.kind = kind;
    if (c) p.c = *c;
    if (J) p.J = *J;
    if (tol) p.tol = *tol;
    return p;
  }
};

/// Summary of one converged solve.
struct SolveRecord {
  std::string method;
  BcKind kind = BcKind::NoSlip;
  double b = 0.0;
  std::optional<double> eps;
  /// "xi_inf", "xi_eps" or "inf".
  std::string boundary;
  std::optional<double> boundary_value;
  std::optional<std::size_t> grid_points;
  std::size_t iterations = 0;
  double beta = 0.0;
  double beta_approx = 0.0;
  std::optional<IvpStats> ivp;
  std::optional<double> update_norm;

  friend bool operator==(const SolveRecord&, const SolveRecord&) = default;
};

struct SolveOutcome {
  std::vector<SolveRecord> records;
  std::vector<MeshSolution> meshes;  // parallel to records
};

namespace detail {

inline SolveRecord shooting_record(Method m, const RunConfig& cfg, const ShootingResult& r, double xi_inf) {
  SolveRecord rec;
  rec.method = std::string(to_string(m));
  rec.kind = cfg.kind;
  rec.b = cfg.b;
  rec.boundary = "xi_inf";
  rec.boundary_value = xi_inf;
  rec.iterations = r.iterations;
  rec.beta = r.beta;
  rec.beta_approx = approx_missing_init(cfg.kind, cfg.b);
  rec.ivp = r.stats;
  return rec;
}

inline SolveRecord fbf_record(Method m, const RunConfig& cfg, const FbfProblem& p, const FbfSolution& s) {
  SolveRecord rec;
  rec.method = std::string(to_string(m));
  rec.kind = cfg.kind;
  rec.b = cfg.b;
  rec.eps = p.eps;
  rec.boundary = "xi_eps";
  rec.boundary_value = s.mesh.free_boundary;
  rec.grid_points = p.J;
  rec.iterations = s.report.iterations;
  rec.beta = s.mesh.beta;
  rec.beta_approx = approx_missing_init(cfg.kind, cfg.b);
  rec.update_norm = s.report.final_update_norm;
  return rec;
}

inline SolveRecord qug_record(const RunConfig& cfg, const QugProblem& p, const QugSolution& s) {
  SolveRecord rec;
  rec.method = std::string(to_string(Method::Qug));
  rec.kind = cfg.kind;
  rec.b = cfg.b;
  rec.boundary = "inf";
  rec.grid_points = p.J;
  rec.iterations = s.report.iterations;
  rec.beta = s.mesh.beta;
  rec.beta_approx = approx_missing_init(cfg.kind, cfg.b);
  rec.update_norm = s.report.final_update_norm;
  return rec;
}

}  // namespace detail

/// Runs the configured solver.  Throws ConfigError for bad configurations
/// and SolverError when the solver fails.
inline SolveOutcome run(const RunConfig& cfg) {
  cfg.validate();
  SolveOutcome out;
  switch (cfg.method) {
    case Method::ShootSecant:
    case Method::ShootNewton: {
      const auto prob = cfg.shooting_problem();
      const auto r = cfg.method == Method::ShootSecant ? solve_secant(*cfg.beta0, *cfg.beta1, prob)
                                                       : solve_newton(*cfg.beta0, prob);
      out.records.push_back(detail::shooting_record(cfg.method, cfg, r, prob.xi_infinity));
      out.meshes.push_back(r.trajectory);
      break;
    }
    case Method::Fbf: {
      const auto prob = cfg.fbf_problem(cfg.eps.front());
      const auto s = solve_fbf(prob);
      out.records.push_back(detail::fbf_record(cfg.method, cfg, prob, s));
      out.meshes.push_back(s.mesh);
      break;
    }
    case Method::FbfContinuation: {
      const auto base = cfg.fbf_problem(cfg.eps.front());
      auto seq = continuation_solve(base, cfg.eps);
      if (seq.failure) std::rethrow_exception(seq.failure);
      for (std::size_t i = 0; i < seq.solutions.size(); ++i) {
        out.records.push_back(detail::fbf_record(cfg.method, cfg, cfg.fbf_problem(seq.eps[i]), seq.solutions[i]));
        out.meshes.push_back(seq.solutions[i].mesh);
      }
      break;
    }
    case Method::Qug: {
      const auto prob = cfg.qug_problem();
      const auto s = solve_qug(prob);
      out.records.push_back(detail::qug_record(cfg, prob, s));
      out.meshes.push_back(s.mesh);
      break;
    }
  }
  return out;
}

/// Worker count for independent runs: BVP_SEED_THREADS when set, otherwise
/// the hardware concurrency.
inline unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("BVP_SEED_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap > 0) n = std::min(n, static_cast<unsigned>(cap));
  }
  return n;
}

/// Runs every task, at most `workers` at a time.  Results keep the task order.
template <class T>
std::vector<T> run_ordered(const std::vector<std::function<T()>>& tasks, unsigned workers) {
  std::vector<T> results(tasks.size());
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) results[i] = tasks[i]();
  };
  const unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(tasks.size())));
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  pool.clear();
  return results;
}

// ---------------------------------------------------------------------------
// Comparison tables

struct ComparisonRow {
  std::string method;    // label as printed in the table
  std::string boundary;  // "xi_inf = 10", "xi_eps = 13.402219", "inf"
  std::optional<std::size_t> grid_points;
  std::size_t iterations = 0;
  double beta = 0.0;
  std::optional<double> boundary_value;
  std::optional<IvpStats> cost;  // shooting rows only

  double expected_beta = 0.0;
  std::size_t expected_iterations = 0;
  std::optional<double> expected_boundary;
  bool beta_ok = false;
  bool iterations_ok = false;
  bool boundary_ok = true;
  std::string error;  // non-empty when the solver failed

  bool pass() const { return error.empty() && beta_ok && iterations_ok && boundary_ok; }
  friend bool operator==(const ComparisonRow&, const ComparisonRow&) = default;
};

struct ComparisonTable {
  BcKind kind = BcKind::NoSlip;
  double approximation = 0.0;
  std::vector<ComparisonRow> rows;

  bool all_pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const ComparisonRow& r) { return r.pass(); });
  }
  friend bool operator==(const ComparisonTable&, const ComparisonTable&) = default;
};

struct TablesOptions {
  bool skip_shooting = false;
  bool skip_fbf = false;
  bool skip_qug = false;
  unsigned threads = 0;  // 0: worker_count()
};

inline std::string_view row_label(reference::RowMethod m, BcKind kind) {
  switch (m) {
    case reference::RowMethod::ShootSecant: return "Shooting-secant";
    case reference::RowMethod::ShootNewton: return "Shooting-Newton";
    case reference::RowMethod::FreeBoundary: return "FBF";
    case reference::RowMethod::QuasiUniform: return kind == BcKind::NoSlip ? "QUG" : "QUM";
  }
  return "?";
}

inline std::string format_fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

/// Solves one reference comparison row from scratch and grades it.
inline ComparisonRow comparison_row(BcKind kind, const reference::ComparisonCase& ref) {
  using reference::RowMethod;
  ComparisonRow row;
  row.method = std::string(row_label(ref.method, kind));
  row.expected_beta = ref.beta;
  row.expected_iterations = ref.iterations;
  const auto tol = reference::tolerance_for(ref.method);
  const ModelParams params(reference::kStrength);
  if (ref.grid_points > 0) row.grid_points = ref.grid_points;

  try {
    switch (ref.method) {
      case RowMethod::ShootSecant:
      case RowMethod::ShootNewton: {
        const reference::ShootingCase* sc = nullptr;
        for (const auto& c : reference::kShootingCases)
          if (c.kind == kind && c.newton == (ref.method == RowMethod::ShootNewton)) sc = &c;
        ShootingProblem prob;
        prob.params = params;
        prob.kind = kind;
        const auto r = ref.method == RowMethod::ShootSecant ? solve_secant(sc->beta0, *sc->beta1, prob)
                                                            : solve_newton(sc->beta0, prob);
        row.boundary = "xi_inf = " + format_fixed(prob.xi_infinity, 0);
        row.boundary_value = prob.xi_infinity;
        row.iterations = r.iterations;
        row.beta = r.beta;
        row.cost = r.stats;
        break;
      }
      case RowMethod::FreeBoundary: {
        FbfProblem prob;
        prob.params = params;
        prob.kind = kind;
        prob.eps = 1e-5;
        prob.J = ref.grid_points;
        const auto s = solve_fbf(prob);
        row.boundary = "xi_eps = " + format_fixed(*s.mesh.free_boundary);
        row.boundary_value = s.mesh.free_boundary;
        row.expected_boundary = ref.boundary;
        row.iterations = s.report.iterations;
        row.beta = s.mesh.beta;
        break;
      }
      case RowMethod::QuasiUniform: {
        QugProblem prob;
        prob.params = params;
        prob.kind = kind;
        prob.J = ref.grid_points;
        const auto s = solve_qug(prob);
        row.boundary = "inf";
        row.iterations = s.report.iterations;
        row.beta = s.mesh.beta;
        break;
      }
    }
  } catch (const std::exception& e) {
    row.error = e.what();
    if (row.error.empty()) row.error = "solver failure";
    return row;
  }

  row.beta_ok = std::abs(row.beta - ref.beta) <= tol.beta;
  row.iterations_ok = reference::iterations_match(row.iterations, ref.iterations, tol.iterations);
  if (row.expected_boundary && tol.boundary > 0.0)
    row.boundary_ok = std::abs(*row.boundary_value - *row.expected_boundary) <= tol.boundary;
  return row;
}

/// Rebuilds both comparison tables (no-slip, then slip).  Rows run
/// concurrently; their order is always the reference order.
inline std::vector<ComparisonTable> reproduce_tables(const TablesOptions& opts = {}) {
  using reference::RowMethod;
  const auto skipped = [&](RowMethod m) {
    switch (m) {
      case RowMethod::ShootSecant:
      case RowMethod::ShootNewton: return opts.skip_shooting;
      case RowMethod::FreeBoundary: return opts.skip_fbf;
      case RowMethod::QuasiUniform: return opts.skip_qug;
    }
    return false;
  };

  std::vector<std::function<ComparisonRow()>> tasks;
  std::vector<std::size_t> table_of_task;
  for (std::size_t t = 0; t < reference::kComparison.size(); ++t) {
    const auto& table = reference::kComparison[t];
    for (const auto& ref : table.rows) {
      if (skipped(ref.method)) continue;
      tasks.push_back([kind = table.kind, ref] { return comparison_row(kind, ref); });
      table_of_task.push_back(t);
    }
  }
  const auto rows = run_ordered(tasks, opts.threads > 0 ? opts.threads : worker_count());

  std::vector<ComparisonTable> tables;
  for (const auto& table : reference::kComparison)
    tables.push_back({table.kind, approx_missing_init(table.kind, reference::kStrength), {}});
  for (std::size_t i = 0; i < rows.size(); ++i) tables[table_of_task[i]].rows.push_back(rows[i]);
  return tables;
}

// ---------------------------------------------------------------------------
// Sweeps over b

struct SweepRow {
  double b = 0.0;
  std::optional<double> beta;  // empty when the solve failed
  double beta_approx = 0.0;
  std::optional<double> abs_gap;
  std::optional<double> rel_gap;
  std::string error;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

/// Solves for each b in the given order with `knobs` (method, kind and
/// method parameters), warm-starting from the previous successful solve.
/// Failed values are marked and the sweep carries on.
inline std::vector<SweepRow> sweep_b(std::span<const double> b_values, const RunConfig& knobs) {
  for (double b : b_values)
    if (!std::isfinite(b) || b < 0.0) throw ConfigError("b values must be finite and non-negative");
  if (knobs.method == Method::FbfContinuation) throw ConfigError("sweep does not support fbf-continuation");

  std::vector<SweepRow> rows;
  std::optional<VectorXd> warm_nodes;
  std::optional<double> warm_beta;

  for (const double b : b_values) {
    RunConfig cfg = knobs;
    cfg.b = b;
    SweepRow row;
    row.b = b;
    row.beta_approx = approx_missing_init(cfg.kind, b);
    try {
      switch (cfg.method) {
        case Method::ShootSecant:
        case Method::ShootNewton: {
          const double seed = warm_beta.value_or(cfg.beta0.value_or(row.beta_approx));
          const auto prob = cfg.shooting_problem();
          const auto r = cfg.method == Method::ShootSecant
                             ? solve_secant(seed, warm_beta ? seed * (1.0 + 1e-3) : cfg.beta1.value_or(seed * 1.01), prob)
                             : solve_newton(seed, prob);
          row.beta = r.beta;
          warm_beta = r.beta;
          break;
        }
        case Method::Fbf: {
          if (cfg.eps.size() != 1) throw ConfigError("fbf sweep takes exactly one --eps");
          const auto s = solve_fbf(cfg.fbf_problem(cfg.eps.front()), warm_nodes);
          row.beta = s.mesh.beta;
          warm_nodes = s.nodes;
          break;
        }
        case Method::Qug: {
          const auto s = solve_qug(cfg.qug_problem(), warm_nodes);
          row.beta = s.mesh.beta;
          warm_nodes = s.nodes;
          break;
        }
        case Method::FbfContinuation:
          break;
      }
    } catch (const SolverError& e) {
      row.error = e.what();
    }
    if (row.beta) {
      row.abs_gap = std::abs(*row.beta - row.beta_approx);
      row.rel_gap = *row.abs_gap / std::abs(row.beta_approx);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace oceanbvp
