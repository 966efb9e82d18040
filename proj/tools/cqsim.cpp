// cqsim: scenario runner for the conserving qubit-environment simulator.
// Exit codes: 0 all gated checks pass, 1 a check failed, 2 configuration
// error, 3 numerical failure.
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cqs/scenario.hpp"

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void print_check(const char* label, const cqs::OrderedJson& check,
                 const char* pass_key = "pass") {
  std::printf("  %-22s value=%-12s tol=%-10s %s\n", label,
              fmt(check.at("value").get<double>()).c_str(),
              fmt(check.at("tolerance").get<double>()).c_str(),
              check.at(pass_key).get<bool>() ? "PASS" : "FAIL");
}

int run_simulate(const std::string& config_path, const std::string& out_dir) {
  const cqs::ScenarioConfig cfg = cqs::parse_scenario_file(config_path);
  const cqs::ScenarioResult result = cqs::run_scenario(cfg);
  const fs::path out(out_dir);
  cqs::emit_timeseries(result.series, out / "timeseries.csv");
  cqs::emit_report(result.report, out / "report.json");

  std::printf("scenario: %s\n", cfg.name.c_str());
  std::printf("  model=%s solver=%s state=%s dim=%d guard=%d samples=%d\n",
              result.report.at("effective").at("model").get<std::string>().c_str(),
              result.report.at("effective").at("solver").get<std::string>().c_str(),
              result.report.at("effective").at("state_kind").get<std::string>().c_str(),
              cfg.space.dim, cfg.space.guard, cfg.grid.steps);
  const auto& checks = result.report.at("checks");
  print_check("riccati residual", checks.at("residual"));
  print_check(checks.at("drift").at("inverted").get<bool>()
                  ? "drift (control, >=tol)"
                  : "conservation drift",
              checks.at("drift"));
  if (checks.at("fidelity").at("applicable").get<bool>()) {
    print_check("factorized fidelity", checks.at("fidelity"));
  }
  std::printf("  %-22s value=%-12s tol=%-10s %s\n", "guard leakage",
              fmt(checks.at("leakage").at("value").get<double>()).c_str(),
              fmt(checks.at("leakage").at("tolerance").get<double>()).c_str(),
              checks.at("leakage").at("within").get<bool>() ? "ok" : "high");
  if (result.report.at("truncation_limited").get<bool>()) {
    std::printf("  note: failures coincide with guard-band leakage; result is "
                "truncation-limited\n");
  }
  std::printf("status: %s\n",
              result.report.at("status").get<std::string>().c_str());
  std::printf("wrote %s and %s\n", (out / "timeseries.csv").string().c_str(),
              (out / "report.json").string().c_str());
  return result.exit_code;
}

int run_sweep_cmd(const std::string& config_path, const std::string& axis,
                  const std::vector<double>& values, const std::string& out_dir) {
  const cqs::ScenarioConfig cfg = cqs::parse_scenario_file(config_path);
  const cqs::SweepResult sweep = cqs::run_sweep(cfg, axis, values);
  const fs::path out(out_dir);
  cqs::emit_sweep(sweep, out / "sweep.csv");
  cqs::OrderedJson aggregate;
  aggregate["name"] = cfg.name;
  aggregate["axis"] = sweep.axis;
  aggregate["points"] = cqs::OrderedJson::array();
  for (const auto& point : sweep.points) {
    aggregate["points"].push_back(point.report);
  }
  cqs::emit_report(aggregate, out / "sweep.json");

  std::printf("sweep: %s over %s (%zu points)\n", cfg.name.c_str(),
              sweep.axis.c_str(), sweep.points.size());
  for (const auto& point : sweep.points) {
    std::printf("  %s=%-12s %s\n", sweep.axis.c_str(), fmt(point.value).c_str(),
                point.report.at("status").get<std::string>().c_str());
  }
  std::printf("wrote %s and %s\n", (out / "sweep.csv").string().c_str(),
              (out / "sweep.json").string().c_str());
  return sweep.exit_code;
}

int run_riccati_check(const std::string& config_path) {
  const cqs::ScenarioConfig cfg = cqs::parse_scenario_file(config_path);
  const cqs::ScenarioProblem prob = cqs::build_problem(cfg);
  const double pseudo = cqs::pseudo_hermiticity_check(prob.sol);
  const double k_plus_defect =
      (prob.sol.k_plus - prob.sol.k_plus.adjoint()).norm();
  const double k_minus_defect =
      (prob.sol.k_minus - prob.sol.k_minus.adjoint()).norm();

  std::printf("riccati-check: %s\n", cfg.name.c_str());
  std::printf("  %-28s %s\n", "residual_norm",
              fmt(prob.sol.residual_norm).c_str());
  std::printf("  %-28s %s\n", "interior_residual_norm",
              fmt(prob.sol.interior_residual_norm).c_str());
  std::printf("  %-28s %s\n", "pseudo_hermiticity_defect", fmt(pseudo).c_str());
  std::printf("  %-28s %s\n", "k_plus_hermitian_defect",
              fmt(k_plus_defect).c_str());
  std::printf("  %-28s %s\n", "k_minus_hermitian_defect",
              fmt(k_minus_defect).c_str());
  if (!prob.sol.note.empty()) {
    std::printf("  %-28s %s\n", "note", prob.sol.note.c_str());
  }
  if (cfg.solver == cqs::SolverKind::graph_subspace) {
    std::printf("  %-28s %s\n", "branch_selection",
                prob.selection.fallback ? "greedy fallback" : "top-dominance");
  }
  const bool pass = prob.sol.residual_norm <= cfg.tol.residual;
  std::printf("status: %s (residual tol %s)\n", pass ? "pass" : "fail",
              fmt(cfg.tol.residual).c_str());
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conserving qubit-environment dephasing simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::string axis;
  std::vector<double> values;

  auto* simulate = app.add_subcommand(
      "simulate", "run a scenario; write timeseries.csv and report.json");
  simulate->add_option("config", config_path, "scenario JSON file")->required();
  simulate->add_option("--out", out_dir, "output directory (default .)");

  auto* sweep = app.add_subcommand(
      "sweep", "run a scenario across parameter values; write sweep.csv/json");
  sweep->add_option("config", config_path, "scenario JSON file")->required();
  sweep->add_option("--axis", axis, "parameter to vary: omega, nu, g, delta")
      ->required();
  sweep->add_option("--values", values, "comma-separated parameter values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--out", out_dir, "output directory (default .)");

  auto* check = app.add_subcommand(
      "riccati-check", "solve and print the residual/pseudo-Hermiticity table");
  check->add_option("config", config_path, "scenario JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (simulate->parsed()) {
      return run_simulate(config_path, out_dir);
    }
    if (sweep->parsed()) {
      return run_sweep_cmd(config_path, axis, values, out_dir);
    }
    return run_riccati_check(config_path);
  } catch (const cqs::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const cqs::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
