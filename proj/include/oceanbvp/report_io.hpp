#pragma once

// Serialization of driver results: human-readable tables, CSV and JSON,
// plus per-node solution profiles.

#include "oceanbvp/driver.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace oceanbvp {

// --- JSON -----------------------------------------------------------------

inline void to_json(nlohmann::json& j, const IvpStats& s) {
  j = {{"steps", s.accepted_steps}, {"rejections", s.rejected_steps}, {"evaluations", s.rhs_evaluations}};
}

inline void from_json(const nlohmann::json& j, IvpStats& s) {
  j.at("steps").get_to(s.accepted_steps);
  j.at("rejections").get_to(s.rejected_steps);
  j.at("evaluations").get_to(s.rhs_evaluations);
}

namespace detail {

template <class T>
void put_optional(nlohmann::json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
  else j[key] = nullptr;
}

template <class T>
void get_optional(const nlohmann::json& j, const char* key, std::optional<T>& v) {
  if (!j.contains(key) || j.at(key).is_null()) v.reset();
  else v = j.at(key).get<T>();
}

}  // namespace detail

inline void to_json(nlohmann::json& j, const SolveRecord& r) {
  j = {{"method", r.method},
       {"bc", std::string(to_string(r.kind))},
       {"b", r.b},
       {"boundary", r.boundary},
       {"iterations", r.iterations},
       {"beta", r.beta},
       {"beta_approx", r.beta_approx}};
  detail::put_optional(j, "eps", r.eps);
  detail::put_optional(j, "boundary_value", r.boundary_value);
  detail::put_optional(j, "gridpoints", r.grid_points);
  detail::put_optional(j, "ivp", r.ivp);
  detail::put_optional(j, "update_norm", r.update_norm);
}

inline void from_json(const nlohmann::json& j, SolveRecord& r) {
  j.at("method").get_to(r.method);
  r.kind = parse_bc_kind(j.at("bc").get<std::string>());
  j.at("b").get_to(r.b);
  j.at("boundary").get_to(r.boundary);
  j.at("iterations").get_to(r.iterations);
  j.at("beta").get_to(r.beta);
  j.at("beta_approx").get_to(r.beta_approx);
  detail::get_optional(j, "eps", r.eps);
  detail::get_optional(j, "boundary_value", r.boundary_value);
  detail::get_optional(j, "gridpoints", r.grid_points);
  detail::get_optional(j, "ivp", r.ivp);
  detail::get_optional(j, "update_norm", r.update_norm);
}

inline void to_json(nlohmann::json& j, const ComparisonRow& r) {
  j = {{"method", r.method},
       {"boundary", r.boundary},
       {"iterations", r.iterations},
       {"beta", r.beta},
       {"expected_beta", r.expected_beta},
       {"expected_iterations", r.expected_iterations},
       {"beta_ok", r.beta_ok},
       {"iterations_ok", r.iterations_ok},
       {"boundary_ok", r.boundary_ok},
       {"pass", r.pass()},
       {"error", r.error}};
  detail::put_optional(j, "gridpoints", r.grid_points);
  detail::put_optional(j, "boundary_value", r.boundary_value);
  detail::put_optional(j, "expected_boundary", r.expected_boundary);
  detail::put_optional(j, "cost", r.cost);
}

inline void from_json(const nlohmann::json& j, ComparisonRow& r) {
  j.at("method").get_to(r.method);
  j.at("boundary").get_to(r.boundary);
  j.at("iterations").get_to(r.iterations);
  j.at("beta").get_to(r.beta);
  j.at("expected_beta").get_to(r.expected_beta);
  j.at("expected_iterations").get_to(r.expected_iterations);
  j.at("beta_ok").get_to(r.beta_ok);
  j.at("iterations_ok").get_to(r.iterations_ok);
  j.at("boundary_ok").get_to(r.boundary_ok);
  j.at("error").get_to(r.error);
  detail::get_optional(j, "gridpoints", r.grid_points);
  detail::get_optional(j, "boundary_value", r.boundary_value);
  detail::get_optional(j, "expected_boundary", r.expected_boundary);
  detail::get_optional(j, "cost", r.cost);
}

inline void to_json(nlohmann::json& j, const ComparisonTable& t) {
  j = {{"bc", std::string(to_string(t.kind))}, {"approximation", t.approximation}, {"rows", t.rows}};
}

inline void from_json(const nlohmann::json& j, ComparisonTable& t) {
  t.kind = parse_bc_kind(j.at("bc").get<std::string>());
  j.at("approximation").get_to(t.approximation);
  j.at("rows").get_to(t.rows);
}

inline void to_json(nlohmann::json& j, const SweepRow& r) {
  j = {{"b", r.b}, {"beta_approx", r.beta_approx}, {"error", r.error}};
  detail::put_optional(j, "beta", r.beta);
  detail::put_optional(j, "abs_gap", r.abs_gap);
  detail::put_optional(j, "rel_gap", r.rel_gap);
}

inline void from_json(const nlohmann::json& j, SweepRow& r) {
  j.at("b").get_to(r.b);
  j.at("beta_approx").get_to(r.beta_approx);
  j.at("error").get_to(r.error);
  detail::get_optional(j, "beta", r.beta);
  detail::get_optional(j, "abs_gap", r.abs_gap);
  detail::get_optional(j, "rel_gap", r.rel_gap);
}

// --- CSV ------------------------------------------------------------------

namespace detail {

// Shortest text that reads back to the same double.
inline std::string exact(double v) {
  char buf[32];
  for (int digits = 15; digits <= 17; ++digits) {
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

template <class T>
std::string opt_text(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_floating_point_v<T>) return exact(*v);
  else return std::to_string(*v);
}

}  // namespace detail

inline constexpr const char* kComparisonHeader = "method,boundary,gridpoints,iterations,beta";
inline constexpr const char* kProfileHeader = "xi,u,du,d2u";
inline constexpr const char* kSweepHeader = "b,beta_numeric,beta_approx,abs_gap,rel_gap,status";
inline constexpr const char* kSolveHeader =
    "method,boundary,gridpoints,iterations,beta,bc,b,eps,boundary_value,beta_approx,steps,rejections,evaluations";

inline void write_solve_csv(std::ostream& os, const std::vector<SolveRecord>& records) {
  using detail::exact;
  using detail::opt_text;
  os << kSolveHeader << '\n';
  for (const auto& r : records) {
    os << r.method << ',' << r.boundary << ',' << opt_text(r.grid_points) << ',' << r.iterations << ','
       << exact(r.beta) << ',' << to_string(r.kind) << ',' << exact(r.b) << ',' << opt_text(r.eps) << ','
       << opt_text(r.boundary_value) << ',' << exact(r.beta_approx) << ',';
    if (r.ivp) os << r.ivp->accepted_steps << ',' << r.ivp->rejected_steps << ',' << r.ivp->rhs_evaluations;
    else os << ",,";
    os << '\n';
  }
}

/// One section per table: a "# bc ..." comment line, then the fixed header.
inline void write_comparison_csv(std::ostream& os, const std::vector<ComparisonTable>& tables) {
  for (const auto& t : tables) {
    os << "# " << to_string(t.kind) << " approximation=" << detail::exact(t.approximation) << '\n';
    os << kComparisonHeader << '\n';
    for (const auto& r : t.rows) {
      os << r.method << ',' << (r.boundary_value && r.boundary != "inf" ? detail::exact(*r.boundary_value) : "inf")
         << ',' << detail::opt_text(r.grid_points) << ',' << r.iterations << ',' << detail::exact(r.beta) << '\n';
    }
  }
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << kSweepHeader << '\n';
  for (const auto& r : rows) {
    os << detail::exact(r.b) << ',' << detail::opt_text(r.beta) << ',' << detail::exact(r.beta_approx) << ','
       << detail::opt_text(r.abs_gap) << ',' << detail::opt_text(r.rel_gap) << ',' << (r.error.empty() ? "ok" : "failed")
       << '\n';
  }
}

/// One row per finite node; a node at infinity is appended as a row whose
/// xi field reads "inf".
inline void write_profile_csv(std::ostream& os, const MeshSolution& sol) {
  os << kProfileHeader << '\n';
  const auto row = [&os](const std::string& xi, const State3& u) {
    os << xi << ',' << detail::exact(u[0]) << ',' << detail::exact(u[1]) << ',' << detail::exact(u[2]) << '\n';
  };
  for (std::size_t i = 0; i < sol.xi.size(); ++i) row(detail::exact(sol.xi[i]), sol.states[i]);
  if (sol.at_infinity) row("inf", *sol.at_infinity);
}

inline void emit_profiles(const MeshSolution& sol, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open profile output '" + path.string() + "'");
  write_profile_csv(out, sol);
  out.flush();
  if (!out) throw std::runtime_error("failed writing profile output '" + path.string() + "'");
}

// --- Text -----------------------------------------------------------------

inline void write_solve_text(std::ostream& os, const std::vector<SolveRecord>& records) {
  for (const auto& r : records) {
    os << "method       " << r.method << '\n'
       << "bc           " << to_string(r.kind) << '\n'
       << "b            " << r.b << '\n';
    if (r.eps) os << "eps          " << *r.eps << '\n';
    os << "boundary     " << r.boundary;
    if (r.boundary_value) os << " = " << format_fixed(*r.boundary_value);
    os << '\n';
    if (r.grid_points) os << "gridpoints   " << *r.grid_points << '\n';
    os << "iterations   " << r.iterations << '\n'
       << "beta         " << format_fixed(r.beta) << '\n'
       << "beta_approx  " << format_fixed(r.beta_approx) << '\n';
    if (r.update_norm) os << "last update  " << *r.update_norm << '\n';
    if (r.ivp)
      os << "ivp cost     steps " << r.ivp->accepted_steps << ", rejections " << r.ivp->rejected_steps
         << ", evaluations " << r.ivp->rhs_evaluations << '\n';
    os << '\n';
  }
}

inline void write_comparison_text(std::ostream& os, const std::vector<ComparisonTable>& tables) {
  const auto mark = [](bool ok) { return ok ? "pass" : "FAIL"; };
  for (const auto& t : tables) {
    os << "Comparison of numerical results, " << to_string(t.kind) << " (approximation gives beta = "
       << format_fixed(t.approximation) << ")\n";
    os << std::left << std::setw(18) << "method" << std::setw(22) << "boundary" << std::right << std::setw(8)
       << "points" << std::setw(6) << "iter" << std::setw(11) << "beta" << "   check (reference)\n";
    for (const auto& r : t.rows) {
      os << std::left << std::setw(18) << r.method << std::setw(22) << r.boundary << std::right << std::setw(8)
         << (r.grid_points ? std::to_string(*r.grid_points) : "") << std::setw(6) << r.iterations << std::setw(11)
         << format_fixed(r.beta);
      if (!r.error.empty()) {
        os << "   FAIL: " << r.error << '\n';
        continue;
      }
      os << "   beta " << mark(r.beta_ok) << " (" << format_fixed(r.expected_beta) << "), iter "
         << mark(r.iterations_ok) << " (" << r.expected_iterations << ")";
      if (r.expected_boundary && r.boundary != "inf" && !r.cost)
        os << ", boundary " << mark(r.boundary_ok) << " (" << format_fixed(*r.expected_boundary) << ")";
      os << '\n';
    }
    os << '\n';
  }

  bool any_cost = false;
  for (const auto& t : tables)
    for (const auto& r : t.rows) any_cost = any_cost || r.cost.has_value();
  if (!any_cost) return;
  os << "Shooting cost (reference counts in parentheses; compared to within a factor of "
     << reference::kCostFactor << ")\n";
  for (const auto& t : tables) {
    for (const auto& r : t.rows) {
      if (!r.cost) continue;
      const bool newton = r.method == "Shooting-Newton";
      for (const auto& ref : reference::kShootingCases) {
        if (ref.kind != t.kind || ref.newton != newton) continue;
        os << std::left << std::setw(9) << to_string(t.kind) << std::setw(17) << r.method << std::right
           << " steps " << r.cost->accepted_steps << " (" << ref.steps << ")"
           << "  rejections " << r.cost->rejected_steps << " (" << ref.rejections << ")"
           << "  evaluations " << r.cost->rhs_evaluations << " (" << ref.evaluations << ") "
           << mark(reference::within_order_of_magnitude(static_cast<double>(r.cost->rhs_evaluations),
                                                        static_cast<double>(ref.evaluations)))
           << '\n';
      }
    }
  }
}

inline void write_sweep_text(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << std::setw(10) << "b" << std::setw(12) << "beta" << std::setw(12) << "approx" << std::setw(12) << "abs gap"
     << std::setw(12) << "rel gap" << '\n';
  for (const auto& r : rows) {
    os << std::setw(10) << r.b;
    if (r.beta) {
      os << std::setw(12) << format_fixed(*r.beta) << std::setw(12) << format_fixed(r.beta_approx) << std::setw(12)
         << std::setprecision(3) << *r.abs_gap << std::setw(12) << *r.rel_gap << std::setprecision(6) << '\n';
    } else {
      os << std::setw(12) << "failed" << std::setw(12) << format_fixed(r.beta_approx) << "   " << r.error << '\n';
    }
  }
}

}  // namespace oceanbvp
