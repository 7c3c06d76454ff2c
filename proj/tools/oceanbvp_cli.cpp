// Command-line front end: solve, tables, sweep, profile.
//
// Exit codes: 0 success, 1 solver failure, 2 usage error.

#include "oceanbvp/driver.hpp"
#include "oceanbvp/report_io.hpp"

#include "CLI11.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace oceanbvp;

constexpr int kSolverFailure = 1;
constexpr int kUsageError = 2;

struct SolverFlags {
  std::string method = "qug";
  std::string bc = "no-slip";
  double b = reference::kStrength;
  std::optional<double> beta0;
  std::optional<double> beta1;
  std::optional<double> xi_inf;
  std::vector<double> eps;
  std::optional<std::size_t> J;
  std::optional<double> c;
  std::optional<double> tol;

  void attach(CLI::App& cmd, bool single_b = true) {
    cmd.add_option("--method", method, "shoot-secant | shoot-newton | fbf | fbf-continuation | qug");
    cmd.add_option("--bc", bc, "no-slip | slip");
    if (single_b) cmd.add_option("--b", b, "nonlinearity strength");
    cmd.add_option("--beta0", beta0, "first shooting iterate");
    cmd.add_option("--beta1", beta1, "second secant iterate");
    cmd.add_option("--xi-inf", xi_inf, "truncated boundary for shooting");
    cmd.add_option("--eps", eps, "free-boundary slope level (repeat for continuation)")->take_all();
    cmd.add_option("--J", J, "mesh intervals");
    cmd.add_option("--c", c, "quasi-uniform map parameter");
    cmd.add_option("--tol", tol, "iteration tolerance");
  }

  RunConfig config() const {
    RunConfig cfg;
    cfg.method = parse_method(method);
    try {
      cfg.kind = parse_bc_kind(bc);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    cfg.b = b;
    cfg.beta0 = beta0;
    cfg.beta1 = beta1;
    cfg.xi_inf = xi_inf;
    cfg.eps = eps;
    cfg.J = J;
    cfg.c = c;
    cfg.tol = tol;
    return cfg;
  }
};

struct OutputFlags {
  std::string format = "table";
  std::string out;

  void attach(CLI::App& cmd, bool with_format = true) {
    if (with_format)
      cmd.add_option("--format", format, "table | csv | json")->check(CLI::IsMember({"table", "csv", "json"}));
    cmd.add_option("--out", out, "output path (default: stdout)");
  }

  void emit(const std::string& text) const {
    if (out.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot open output '" + out + "'");
    f << text;
    if (!f.flush()) throw std::runtime_error("failed writing output '" + out + "'");
  }
};

int cmd_solve(const SolverFlags& flags, const OutputFlags& output) {
  const auto outcome = run(flags.config());
  std::ostringstream os;
  if (output.format == "json") os << nlohmann::json(outcome.records).dump(2) << '\n';
  else if (output.format == "csv") write_solve_csv(os, outcome.records);
  else write_solve_text(os, outcome.records);
  output.emit(os.str());
  return 0;
}

int cmd_profile(const SolverFlags& flags, const OutputFlags& output) {
  const auto outcome = run(flags.config());
  std::ostringstream os;
  write_profile_csv(os, outcome.meshes.back());
  output.emit(os.str());
  return 0;
}

int cmd_tables(const std::vector<std::string>& skip, const OutputFlags& output) {
  TablesOptions opts;
  for (const auto& item : skip) {
    if (item == "shooting") opts.skip_shooting = true;
    else if (item == "fbf") opts.skip_fbf = true;
    else if (item == "qug") opts.skip_qug = true;
    else throw ConfigError("--skip accepts shooting, fbf, qug; got '" + item + "'");
  }
  const auto tables = reproduce_tables(opts);
  std::ostringstream os;
  if (output.format == "json") os << nlohmann::json(tables).dump(2) << '\n';
  else if (output.format == "csv") write_comparison_csv(os, tables);
  else write_comparison_text(os, tables);
  output.emit(os.str());

  for (const auto& t : tables)
    for (const auto& r : t.rows)
      if (!r.error.empty()) return kSolverFailure;
  return 0;
}

int cmd_sweep(const std::vector<double>& bs, const SolverFlags& flags, const OutputFlags& output) {
  SolverFlags base = flags;
  base.b = 0.0;
  RunConfig cfg = base.config();
  if (is_free_boundary(cfg.method) && cfg.eps.empty()) throw ConfigError("--eps is required for fbf");
  const auto rows = sweep_b(bs, cfg);
  std::ostringstream os;
  if (output.format == "json") os << nlohmann::json(rows).dump(2) << '\n';
  else if (output.format == "table") write_sweep_text(os, rows);
  else write_sweep_csv(os, rows);
  output.emit(os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-infinite boundary value solvers for the western boundary-layer ocean model"};
  app.require_subcommand(1);

  SolverFlags solve_flags;
  OutputFlags solve_out;
  auto* solve = app.add_subcommand("solve", "run one solver and report beta, boundary and cost");
  solve_flags.attach(*solve);
  solve_out.attach(*solve);

  std::vector<std::string> skip;
  OutputFlags tables_out;
  auto* tables = app.add_subcommand("tables", "rebuild the cross-method comparison tables");
  tables->add_option("--skip", skip, "comma-separated subset of shooting,fbf,qug")->delimiter(',');
  tables_out.attach(*tables);

  std::vector<double> sweep_bs;
  SolverFlags sweep_flags;
  OutputFlags sweep_out;
  sweep_out.format = "csv";
  auto* sweep = app.add_subcommand("sweep", "solve over a list of b values and compare with the closed-form estimate");
  sweep->add_option("--b", sweep_bs, "b values (comma-separated or repeated, solved in the given order)")
      ->delimiter(',')
      ->take_all();
  sweep_flags.attach(*sweep, false);
  sweep_out.attach(*sweep);

  SolverFlags profile_flags;
  OutputFlags profile_out;
  auto* profile = app.add_subcommand("profile", "write xi,u,du,d2u for a converged solution");
  profile_flags.attach(*profile);
  profile_out.attach(*profile, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*solve) return cmd_solve(solve_flags, solve_out);
    if (*tables) return cmd_tables(skip, tables_out);
    if (*sweep) return cmd_sweep(sweep_bs, sweep_flags, sweep_out);
    if (*profile) return cmd_profile(profile_flags, profile_out);
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolverFailure;
  }
  return kUsageError;
}
