// Scenario layer: JSON configuration parsing with strict key checking,
// problem assembly shared by every entry point, scenario and sweep
// execution, and deterministic CSV/JSON emission.
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cqs/dynamics.hpp"

namespace cqs {

using OrderedJson = nlohmann::ordered_json;

enum class ModelKind { jc, rabi, custom_blocks };
enum class SolverKind { analytic, graph_subspace };
enum class SeedKind { fock, coherent, amplitudes };
enum class RunKind { psi, phi, rabi_parity, product_control };

struct Tolerances {
  double residual = 1e-8;
  double drift = 1e-8;
  double fidelity = 1e-6;
  double leakage = 1e-8;
  double control_drift = 0.01;  // minimum drift a product control must show
};

struct SeedSpec {
  SeedKind kind = SeedKind::fock;
  int fock_m = 0;
  Complex coherent_alpha{};
  int coherent_cutoff = 0;
  Vector amplitudes;
};

struct ScenarioConfig {
  std::string name;
  ModelKind model = ModelKind::jc;
  SolverKind solver = SolverKind::analytic;
  RunKind run = RunKind::psi;
  int parity_eps = +1;

  double omega = 0.0;
  double nu = 0.0;
  Complex g{};
  int rabi_k = 1;

  Matrix observable;  // 2x2 Hermitian, physical qubit basis
  std::string observable_name;

  SeedSpec seed;
  FockSpace space;
  TimeGrid grid;
  Tolerances tol;

  std::optional<BlockHamiltonian> custom_blocks;
  OrderedJson echo;  // parsed document, replayed into the report
};

ScenarioConfig parse_scenario(const std::string& json_text);
ScenarioConfig parse_scenario_file(const std::filesystem::path& path);

// Model assembly shared by simulate, riccati-check, and the tests: total
// Hamiltonian, observable frame, full-frame block form, and the Riccati
// solution against those blocks.
struct ScenarioProblem {
  Matrix h_total;
  ObservableDiag diag;
  BlockHamiltonian blocks;
  RiccatiSolution sol;
  GraphSelection selection;
};

ScenarioProblem build_problem(const ScenarioConfig& cfg);

struct ScenarioResult {
  TimeSeries series;
  OrderedJson report;
  int exit_code = 0;  // 0 pass, 1 check failure
};

ScenarioResult run_scenario(const ScenarioConfig& cfg);

struct SweepPoint {
  double value = 0.0;
  OrderedJson report;
  int exit_code = 0;
};

struct SweepResult {
  std::string axis;
  std::vector<SweepPoint> points;
  int exit_code = 0;
};

// Axis is one of omega, nu, g, delta; delta assigns omega = nu + value.
// Points run concurrently, capped by CQS_THREADS.
SweepResult run_sweep(const ScenarioConfig& base, const std::string& axis,
                      std::vector<double> values);

// Emission is deterministic: fixed column order, %.17g floats, atomic
// replace via a temporary in the target directory.
void emit_timeseries(const TimeSeries& series,
                     const std::filesystem::path& path);
void emit_report(const OrderedJson& report, const std::filesystem::path& path);
void emit_sweep(const SweepResult& sweep, const std::filesystem::path& path);

int max_threads();

}  // namespace cqs
