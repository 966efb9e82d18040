#include "cqs/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <thread>

namespace cqs {

namespace fs = std::filesystem;

namespace {

void require_keys(const OrderedJson& obj, const std::string& where,
                  std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) {
      if (it.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError(where + ": unknown key '" + it.key() + "'");
    }
  }
}

double get_number(const OrderedJson& j, const std::string& where) {
  if (!j.is_number()) {
    throw ConfigError(where + " must be a number");
  }
  return j.get<double>();
}

int get_int(const OrderedJson& j, const std::string& where) {
  if (!j.is_number_integer()) {
    throw ConfigError(where + " must be an integer");
  }
  return j.get<int>();
}

Complex get_complex(const OrderedJson& j, const std::string& where) {
  if (j.is_number()) {
    return Complex(j.get<double>(), 0.0);
  }
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return Complex(j[0].get<double>(), j[1].get<double>());
  }
  throw ConfigError(where + " must be a number or an [re, im] pair");
}

Matrix get_matrix(const OrderedJson& j, const std::string& where) {
  if (!j.is_array() || j.empty()) {
    throw ConfigError(where + " must be a non-empty array of rows");
  }
  Matrix m;
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || row.empty()) {
      throw ConfigError(where + ": row " + std::to_string(r) +
                        " must be a non-empty array");
    }
    if (r == 0) {
      cols = static_cast<Eigen::Index>(row.size());
      m = Matrix(rows, cols);
    } else if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw ConfigError(where + " must be rectangular");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = get_complex(row[static_cast<std::size_t>(c)],
                            where + " entry (" + std::to_string(r) + "," +
                                std::to_string(c) + ")");
    }
  }
  return m;
}

Matrix parse_observable(const OrderedJson& j, std::string* name) {
  if (j.is_string()) {
    const std::string preset = j.get<std::string>();
    *name = preset;
    if (preset == "sigma_x") {
      return qubit_ops().sx;
    }
    if (preset == "sigma_y") {
      return qubit_ops().sy;
    }
    if (preset == "sigma_z") {
      return qubit_ops().sz;
    }
    throw ConfigError("observable preset '" + preset +
                      "' not recognized (sigma_x, sigma_y, sigma_z)");
  }
  *name = "custom";
  Matrix m = get_matrix(j, "observable");
  if (m.rows() != 2 || m.cols() != 2) {
    throw ConfigError("observable must be a 2x2 matrix");
  }
  return m;
}

SeedSpec parse_seed(const OrderedJson& j) {
  if (!j.is_object() || j.size() != 1) {
    throw ConfigError(
        "seed_state must be an object with exactly one of: fock, coherent, "
        "amplitudes");
  }
  SeedSpec seed;
  if (j.contains("fock")) {
    seed.kind = SeedKind::fock;
    seed.fock_m = get_int(j.at("fock"), "seed_state.fock");
    if (seed.fock_m < 0) {
      throw ConfigError("seed_state.fock must be >= 0");
    }
  } else if (j.contains("coherent")) {
    const auto& c = j.at("coherent");
    if (!c.is_object()) {
      throw ConfigError("seed_state.coherent must be an object");
    }
    require_keys(c, "seed_state.coherent", {"alpha", "cutoff"});
    if (!c.contains("alpha") || !c.contains("cutoff")) {
      throw ConfigError("seed_state.coherent requires alpha and cutoff");
    }
    seed.kind = SeedKind::coherent;
    seed.coherent_alpha = get_complex(c.at("alpha"), "seed_state.coherent.alpha");
    seed.coherent_cutoff = get_int(c.at("cutoff"), "seed_state.coherent.cutoff");
    if (seed.coherent_cutoff < 0) {
      throw ConfigError("seed_state.coherent.cutoff must be >= 0");
    }
  } else if (j.contains("amplitudes")) {
    const auto& arr = j.at("amplitudes");
    if (!arr.is_array() || arr.empty()) {
      throw ConfigError("seed_state.amplitudes must be a non-empty array");
    }
    seed.kind = SeedKind::amplitudes;
    seed.amplitudes = Vector(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) {
      seed.amplitudes(static_cast<Eigen::Index>(i)) =
          get_complex(arr[i], "seed_state.amplitudes entry " + std::to_string(i));
    }
    if (seed.amplitudes.norm() == 0.0) {
      throw ConfigError("seed_state.amplitudes are all zero");
    }
  } else {
    throw ConfigError("seed_state must contain one of: fock, coherent, amplitudes");
  }
  return seed;
}

int seed_support_max(const SeedSpec& seed) {
  switch (seed.kind) {
    case SeedKind::fock:
      return seed.fock_m;
    case SeedKind::coherent:
      return seed.coherent_cutoff;
    case SeedKind::amplitudes:
    default: {
      int top = 0;
      for (Eigen::Index i = 0; i < seed.amplitudes.size(); ++i) {
        if (std::abs(seed.amplitudes(i)) > 0.0) {
          top = static_cast<int>(i);
        }
      }
      return top;
    }
  }
}

void parse_state_kind(const OrderedJson& j, ScenarioConfig* cfg) {
  if (j.is_string()) {
    const std::string kind = j.get<std::string>();
    if (kind == "psi") {
      cfg->run = RunKind::psi;
    } else if (kind == "phi") {
      cfg->run = RunKind::phi;
    } else if (kind == "product_control") {
      cfg->run = RunKind::product_control;
    } else {
      throw ConfigError("state_kind '" + kind +
                        "' not recognized (psi, phi, product_control, "
                        "{\"rabi_parity\": +/-1})");
    }
    return;
  }
  if (j.is_object() && j.size() == 1 && j.contains("rabi_parity")) {
    cfg->run = RunKind::rabi_parity;
    cfg->parity_eps = get_int(j.at("rabi_parity"), "state_kind.rabi_parity");
    if (cfg->parity_eps != 1 && cfg->parity_eps != -1) {
      throw ConfigError("state_kind.rabi_parity must be +1 or -1");
    }
    return;
  }
  throw ConfigError(
      "state_kind must be psi, phi, product_control, or {\"rabi_parity\": +/-1}");
}

BlockHamiltonian parse_blocks(const OrderedJson& j, const FockSpace& space) {
  if (!j.is_object()) {
    throw ConfigError("blocks must be an object");
  }
  require_keys(j, "blocks", {"h_plus", "h_minus", "v"});
  for (const char* key : {"h_plus", "h_minus", "v"}) {
    if (!j.contains(key)) {
      throw ConfigError(std::string("blocks requires '") + key + "'");
    }
  }
  BlockHamiltonian blocks;
  blocks.h_plus = get_matrix(j.at("h_plus"), "blocks.h_plus");
  blocks.h_minus = get_matrix(j.at("h_minus"), "blocks.h_minus");
  blocks.v = get_matrix(j.at("v"), "blocks.v");
  blocks.space = space;
  for (const auto* m : {&blocks.h_plus, &blocks.h_minus, &blocks.v}) {
    if (m->rows() != space.dim || m->cols() != space.dim) {
      throw ConfigError("blocks matrices must be " + std::to_string(space.dim) +
                        "x" + std::to_string(space.dim) +
                        " to match space.dim");
    }
  }
  for (const auto* m : {&blocks.h_plus, &blocks.h_minus}) {
    if ((*m - m->adjoint()).norm() > 1e-10 * (1.0 + m->norm())) {
      throw ConfigError("blocks.h_plus and blocks.h_minus must be Hermitian");
    }
  }
  return blocks;
}

const char* model_name(ModelKind model) {
  switch (model) {
    case ModelKind::jc:
      return "jc";
    case ModelKind::rabi:
      return "rabi";
    case ModelKind::custom_blocks:
    default:
      return "custom-blocks";
  }
}

const char* solver_name(SolverKind solver) {
  return solver == SolverKind::analytic ? "analytic" : "graph_subspace";
}

const char* run_name(RunKind run) {
  switch (run) {
    case RunKind::psi:
      return "psi";
    case RunKind::phi:
      return "phi";
    case RunKind::rabi_parity:
      return "rabi_parity";
    case RunKind::product_control:
    default:
      return "product_control";
  }
}

Vector build_seed(const ScenarioConfig& cfg) {
  switch (cfg.seed.kind) {
    case SeedKind::fock:
      return fock_seed(cfg.seed.fock_m, cfg.space);
    case SeedKind::coherent:
      return coherent_seed(cfg.seed.coherent_alpha, cfg.seed.coherent_cutoff,
                           cfg.space);
    case SeedKind::amplitudes:
    default: {
      Vector v = Vector::Zero(cfg.space.dim);
      v.head(cfg.seed.amplitudes.size()) = cfg.seed.amplitudes;
      v.normalize();
      return v;
    }
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) {
      throw ConfigError("cannot create output directory " +
                        path.parent_path().string() + ": " + ec.message());
    }
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw ConfigError("cannot open " + tmp.string() + " for writing");
    }
    out << content;
    out.flush();
    if (!out) {
      throw ConfigError("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    throw ConfigError("atomic replace failed for " + path.string() + ": " +
                      ec.message());
  }
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& json_text) {
  OrderedJson doc;
  try {
    doc = OrderedJson::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw ConfigError("config must be a JSON object");
  }
  require_keys(doc, "config",
               {"name", "model", "params", "observable", "solver", "seed_state",
                "state_kind", "space", "grid", "tolerances", "blocks"});

  ScenarioConfig cfg;
  cfg.echo = doc;
  cfg.name = "scenario";
  if (doc.contains("name")) {
    if (!doc.at("name").is_string()) {
      throw ConfigError("name must be a string");
    }
    cfg.name = doc.at("name").get<std::string>();
  }

  if (!doc.contains("model") || !doc.at("model").is_string()) {
    throw ConfigError("config requires a 'model' string");
  }
  const std::string model = doc.at("model").get<std::string>();
  if (model == "jc") {
    cfg.model = ModelKind::jc;
  } else if (model == "rabi") {
    cfg.model = ModelKind::rabi;
  } else if (model == "custom-blocks") {
    cfg.model = ModelKind::custom_blocks;
  } else {
    throw ConfigError("model '" + model +
                      "' not recognized (jc, rabi, custom-blocks)");
  }

  bool k_given = false;
  if (doc.contains("params")) {
    const auto& p = doc.at("params");
    if (!p.is_object()) {
      throw ConfigError("params must be an object");
    }
    require_keys(p, "params", {"omega", "nu", "g", "k"});
    if (cfg.model == ModelKind::custom_blocks && !p.empty()) {
      throw ConfigError("params do not apply to the custom-blocks model");
    }
    if (p.contains("omega")) {
      cfg.omega = get_number(p.at("omega"), "params.omega");
    }
    if (p.contains("nu")) {
      cfg.nu = get_number(p.at("nu"), "params.nu");
    }
    if (p.contains("g")) {
      cfg.g = get_complex(p.at("g"), "params.g");
    }
    if (p.contains("k")) {
      k_given = true;
      cfg.rabi_k = get_int(p.at("k"), "params.k");
    }
  }
  if (k_given && cfg.model != ModelKind::rabi) {
    throw ConfigError("params.k applies to the rabi model only");
  }

  if (!doc.contains("observable")) {
    throw ConfigError("config requires 'observable'");
  }
  cfg.observable = parse_observable(doc.at("observable"), &cfg.observable_name);
  diagonalize_observable(cfg.observable);  // rejects non-Hermitian input early

  cfg.solver = cfg.model == ModelKind::custom_blocks ? SolverKind::graph_subspace
                                                     : SolverKind::analytic;
  if (doc.contains("solver")) {
    if (!doc.at("solver").is_string()) {
      throw ConfigError("solver must be a string");
    }
    const std::string solver = doc.at("solver").get<std::string>();
    if (solver == "analytic") {
      cfg.solver = SolverKind::analytic;
    } else if (solver == "graph_subspace") {
      cfg.solver = SolverKind::graph_subspace;
    } else {
      throw ConfigError("solver '" + solver +
                        "' not recognized (analytic, graph_subspace)");
    }
  }
  if (cfg.model == ModelKind::custom_blocks &&
      cfg.solver != SolverKind::graph_subspace) {
    throw ConfigError("the custom-blocks model requires the graph_subspace solver");
  }

  if (doc.contains("seed_state")) {
    cfg.seed = parse_seed(doc.at("seed_state"));
  }

  if (doc.contains("state_kind")) {
    parse_state_kind(doc.at("state_kind"), &cfg);
  }
  if (cfg.run == RunKind::rabi_parity &&
      (cfg.model != ModelKind::rabi || cfg.solver != SolverKind::analytic)) {
    throw ConfigError(
        "rabi_parity states require the rabi model with the analytic solver");
  }

  int dim = 64;
  int guard = -1;
  if (doc.contains("space")) {
    const auto& s = doc.at("space");
    if (!s.is_object()) {
      throw ConfigError("space must be an object");
    }
    require_keys(s, "space", {"dim", "guard"});
    if (s.contains("dim")) {
      dim = get_int(s.at("dim"), "space.dim");
    }
    if (s.contains("guard")) {
      guard = get_int(s.at("guard"), "space.guard");
      if (guard < 0) {
        throw ConfigError("space.guard must be >= 0");
      }
    }
  }
  if (guard < 0) {
    guard = (dim + 7) / 8;
  }
  cfg.space = FockSpace(dim, guard);

  if (cfg.model == ModelKind::rabi && (cfg.rabi_k < 1 || cfg.rabi_k >= dim)) {
    throw ConfigError("params.k must satisfy 1 <= k < space.dim");
  }

  if (cfg.model == ModelKind::custom_blocks) {
    if (!doc.contains("blocks")) {
      throw ConfigError("the custom-blocks model requires 'blocks'");
    }
    cfg.custom_blocks = parse_blocks(doc.at("blocks"), cfg.space);
  } else if (doc.contains("blocks")) {
    throw ConfigError("'blocks' applies to the custom-blocks model only");
  }

  if (cfg.seed.kind == SeedKind::amplitudes &&
      cfg.seed.amplitudes.size() > dim) {
    throw ConfigError("seed_state.amplitudes has more entries than space.dim");
  }
  const int s_max = seed_support_max(cfg.seed);
  if (s_max >= dim) {
    throw ConfigError("seed occupies level " + std::to_string(s_max) +
                      ", outside a space of dimension " + std::to_string(dim));
  }
  if (dim < 2 * (s_max + 1)) {
    throw ConfigError("space.dim must be at least twice the occupied seed "
                      "levels (need >= " +
                      std::to_string(2 * (s_max + 1)) + ")");
  }
  if (s_max > dim - cfg.space.guard - 1) {
    throw ConfigError("seed occupies the guard band; enlarge space.dim or "
                      "shrink space.guard");
  }

  cfg.grid.t_start = 0.0;
  cfg.grid.t_end = std::abs(cfg.g) > 0.0 ? 20.0 / std::abs(cfg.g) : 20.0;
  cfg.grid.steps = 201;
  if (doc.contains("grid")) {
    const auto& g = doc.at("grid");
    if (!g.is_object()) {
      throw ConfigError("grid must be an object");
    }
    require_keys(g, "grid", {"t_start", "t_end", "steps"});
    if (g.contains("t_start")) {
      cfg.grid.t_start = get_number(g.at("t_start"), "grid.t_start");
    }
    if (g.contains("t_end")) {
      cfg.grid.t_end = get_number(g.at("t_end"), "grid.t_end");
    }
    if (g.contains("steps")) {
      cfg.grid.steps = get_int(g.at("steps"), "grid.steps");
    }
  }
  if (cfg.grid.steps < 2) {
    throw ConfigError("grid.steps must be >= 2");
  }
  if (!(cfg.grid.t_end > cfg.grid.t_start)) {
    throw ConfigError("grid.t_end must exceed grid.t_start");
  }

  if (doc.contains("tolerances")) {
    const auto& t = doc.at("tolerances");
    if (!t.is_object()) {
      throw ConfigError("tolerances must be an object");
    }
    require_keys(t, "tolerances",
                 {"residual", "drift", "fidelity", "leakage", "control_drift"});
    const auto read = [&t](const char* key, double* slot) {
      if (t.contains(key)) {
        *slot = get_number(t.at(key), std::string("tolerances.") + key);
        if (*slot < 0.0) {
          throw ConfigError(std::string("tolerances.") + key +
                            " must be >= 0");
        }
      }
    };
    read("residual", &cfg.tol.residual);
    read("drift", &cfg.tol.drift);
    read("fidelity", &cfg.tol.fidelity);
    read("leakage", &cfg.tol.leakage);
    read("control_drift", &cfg.tol.control_drift);
  }

  return cfg;
}

ScenarioConfig parse_scenario_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot read config file " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

ScenarioProblem build_problem(const ScenarioConfig& cfg) {
  ScenarioProblem prob;
  prob.diag = diagonalize_observable(cfg.observable);
  const int d = cfg.space.dim;

  switch (cfg.model) {
    case ModelKind::jc:
      prob.h_total = jc_model({cfg.omega, cfg.nu, cfg.g}, cfg.space).h_total;
      break;
    case ModelKind::rabi:
      prob.h_total =
          rabi_model({cfg.omega, cfg.nu, cfg.g, cfg.rabi_k}, cfg.space);
      break;
    case ModelKind::custom_blocks: {
      prob.blocks = *cfg.custom_blocks;
      const Matrix rot = tensor(prob.diag.u, Matrix::Identity(d, d));
      prob.h_total = rot * block_assemble(prob.blocks) * rot.adjoint();
      break;
    }
  }
  if (cfg.model != ModelKind::custom_blocks) {
    prob.blocks = block_decompose(to_kamiltonian(prob.h_total, prob.diag, cfg.space),
                                  cfg.space);
  }

  if (cfg.solver == SolverKind::graph_subspace) {
    prob.sol = solve_graph_subspace(prob.blocks, nullptr, &prob.selection);
    return prob;
  }

  const Matrix identity2 = Matrix::Identity(2, 2);
  if (cfg.model == ModelKind::jc) {
    if ((prob.diag.u - identity2).norm() > 1e-12) {
      throw ConfigError(
          "the analytic jc solver requires an observable diagonal in the "
          "qubit energy basis (e.g. sigma_z)");
    }
    const RiccatiSolution split =
        solve_jc_analytic({cfg.omega, cfg.nu, cfg.g}, cfg.space);
    prob.sol = kamiltonians(prob.blocks, split.x, split.note);
    return prob;
  }

  Matrix hadamard(2, 2);
  hadamard << 1.0, 1.0, 1.0, -1.0;
  hadamard /= std::sqrt(2.0);
  if ((prob.diag.u - hadamard).norm() > 1e-12) {
    throw ConfigError(
        "the analytic rabi solver requires an observable diagonal in the "
        "sigma_x basis");
  }
  Matrix x = generalized_parity(cfg.rabi_k, cfg.space);
  std::string note = "generalized parity solution";
  if (cfg.run == RunKind::rabi_parity && cfg.parity_eps == -1) {
    x = -x;
    note += " (negative sector)";
  }
  prob.sol = kamiltonians(prob.blocks, x, std::move(note));
  return prob;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  ScenarioProblem prob = build_problem(cfg);
  const Vector seed_env = build_seed(cfg);

  DephasingState state;
  switch (cfg.run) {
    case RunKind::psi:
      state = dephasing_state(prob.sol, prob.diag, seed_env);
      break;
    case RunKind::phi:
      state = orthogonal_state(prob.sol, prob.diag, seed_env);
      break;
    case RunKind::rabi_parity:
      state = rabi_parity_state(generalized_parity(cfg.rabi_k, cfg.space),
                                seed_env, cfg.parity_eps);
      break;
    case RunKind::product_control: {
      const Vector s_hat = seed_env.normalized();
      const Eigen::Index d = s_hat.size();
      state.seed_raw = s_hat;
      state.seed = s_hat;
      state.vec = Vector(2 * d);
      state.vec.head(d) = prob.diag.u(0, 0) * s_hat;
      state.vec.tail(d) = prob.diag.u(1, 0) * s_hat;
      break;
    }
  }

  const bool has_factorized = cfg.run != RunKind::product_control;
  const auto exact = propagate_exact(prob.h_total, state.vec, cfg.grid);
  std::vector<Vector> factorized;
  if (has_factorized) {
    factorized = cfg.run == RunKind::phi
                     ? propagate_factorized_orthogonal(prob.sol, prob.diag,
                                                       state.seed, cfg.grid)
                     : propagate_factorized(prob.sol, prob.diag, state.seed,
                                            cfg.grid);
  }

  TimeSeries series;
  series.times = cfg.grid.times();
  const int d = cfg.space.dim;
  const int guard = cfg.space.guard;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    const Matrix rho = reduced_density(exact[i]);
    const Matrix rho_frame = prob.diag.u.adjoint() * rho * prob.diag.u;
    const double alpha = rho_frame(0, 0).real();
    series.alpha.push_back(alpha);
    series.coherence.push_back(rho_frame(0, 1));
    series.lambda_expect.push_back(lambda_expectation(alpha, prob.diag));
    double leak = 0.0;
    if (guard > 0) {
      leak = exact[i].segment(d - guard, guard).squaredNorm() +
             exact[i].tail(guard).squaredNorm();
    }
    series.leakage.push_back(leak);
    series.fidelity.push_back(
        has_factorized ? std::norm(exact[i].dot(factorized[i])) : 1.0);
  }

  const ConservationReport cons =
      conservation_report(series, cfg.tol.drift, cfg.tol.leakage);
  const double min_fidelity =
      *std::min_element(series.fidelity.begin(), series.fidelity.end());

  const bool residual_pass = prob.sol.residual_norm <= cfg.tol.residual;
  const bool drift_inverted = cfg.run == RunKind::product_control;
  const bool drift_pass = drift_inverted
                              ? cons.max_drift >= cfg.tol.control_drift
                              : cons.drift_ok;
  const bool fidelity_pass =
      !has_factorized || min_fidelity >= 1.0 - cfg.tol.fidelity;
  const bool all_pass = residual_pass && drift_pass && fidelity_pass;

  OrderedJson report;
  report["name"] = cfg.name;
  report["status"] = all_pass ? "pass" : "fail";

  OrderedJson effective;
  effective["model"] = model_name(cfg.model);
  effective["solver"] = solver_name(cfg.solver);
  effective["state_kind"] = run_name(cfg.run);
  if (cfg.run == RunKind::rabi_parity) {
    effective["parity_eps"] = cfg.parity_eps;
  }
  effective["observable"] = cfg.observable_name;
  if (cfg.model != ModelKind::custom_blocks) {
    OrderedJson params;
    params["omega"] = cfg.omega;
    params["nu"] = cfg.nu;
    params["g"] = {cfg.g.real(), cfg.g.imag()};
    if (cfg.model == ModelKind::rabi) {
      params["k"] = cfg.rabi_k;
    }
    effective["params"] = params;
  }
  switch (cfg.seed.kind) {
    case SeedKind::fock:
      effective["seed_state"] = {{"kind", "fock"}, {"level", cfg.seed.fock_m}};
      break;
    case SeedKind::coherent:
      effective["seed_state"] = {
          {"kind", "coherent"},
          {"alpha", {cfg.seed.coherent_alpha.real(), cfg.seed.coherent_alpha.imag()}},
          {"cutoff", cfg.seed.coherent_cutoff}};
      break;
    case SeedKind::amplitudes:
      effective["seed_state"] = {
          {"kind", "amplitudes"},
          {"levels", static_cast<int>(cfg.seed.amplitudes.size())}};
      break;
  }
  effective["space"] = {{"dim", cfg.space.dim}, {"guard", cfg.space.guard}};
  effective["grid"] = {{"t_start", cfg.grid.t_start},
                       {"t_end", cfg.grid.t_end},
                       {"steps", cfg.grid.steps}};
  effective["tolerances"] = {{"residual", cfg.tol.residual},
                             {"drift", cfg.tol.drift},
                             {"fidelity", cfg.tol.fidelity},
                             {"leakage", cfg.tol.leakage},
                             {"control_drift", cfg.tol.control_drift}};
  report["effective"] = effective;
  report["config"] = cfg.echo;

  OrderedJson riccati;
  riccati["residual_norm"] = prob.sol.residual_norm;
  riccati["interior_residual_norm"] = prob.sol.interior_residual_norm;
  riccati["pseudo_hermiticity_defect"] = pseudo_hermiticity_check(prob.sol);
  riccati["note"] = prob.sol.note;
  if (cfg.solver == SolverKind::graph_subspace) {
    riccati["branch_selection"] = {{"fallback", prob.selection.fallback},
                                   {"indices", prob.selection.indices}};
  }
  report["riccati"] = riccati;

  report["series"] = {{"samples", static_cast<int>(series.times.size())},
                      {"lambda_initial", series.lambda_expect.front()},
                      {"alpha_initial", series.alpha.front()},
                      {"max_drift", cons.max_drift},
                      {"min_fidelity", min_fidelity},
                      {"leak_max", cons.leak_max}};

  OrderedJson checks;
  checks["residual"] = {{"value", prob.sol.residual_norm},
                        {"tolerance", cfg.tol.residual},
                        {"pass", residual_pass}};
  checks["drift"] = {{"value", cons.max_drift},
                     {"tolerance", drift_inverted ? cfg.tol.control_drift
                                                  : cfg.tol.drift},
                     {"inverted", drift_inverted},
                     {"pass", drift_pass}};
  checks["fidelity"] = {{"value", min_fidelity},
                        {"tolerance", cfg.tol.fidelity},
                        {"applicable", has_factorized},
                        {"pass", fidelity_pass}};
  checks["leakage"] = {{"value", cons.leak_max},
                       {"tolerance", cfg.tol.leakage},
                       {"within", cons.leak_ok}};
  report["checks"] = checks;
  report["truncation_limited"] = !all_pass && !cons.leak_ok;

  ScenarioResult result;
  result.series = std::move(series);
  result.report = std::move(report);
  result.exit_code = all_pass ? 0 : 1;
  return result;
}

SweepResult run_sweep(const ScenarioConfig& base, const std::string& axis,
                      std::vector<double> values) {
  if (values.empty()) {
    throw ConfigError("sweep requires at least one value");
  }
  if (base.model == ModelKind::custom_blocks) {
    throw ConfigError("sweep requires a parametric model (jc or rabi)");
  }
  if (axis != "omega" && axis != "nu" && axis != "g" && axis != "delta") {
    throw ConfigError("sweep axis must be one of: omega, nu, g, delta");
  }
  std::sort(values.begin(), values.end());

  SweepResult sweep;
  sweep.axis = axis;
  sweep.points.resize(values.size());

  std::atomic<std::size_t> next{0};
  const auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= values.size()) {
        return;
      }
      SweepPoint& point = sweep.points[i];
      point.value = values[i];
      try {
        ScenarioConfig cfg = base;
        cfg.name = base.name + "[" + axis + "=" + format_short(values[i]) + "]";
        if (axis == "omega") {
          cfg.omega = values[i];
        } else if (axis == "nu") {
          cfg.nu = values[i];
        } else if (axis == "g") {
          cfg.g = Complex(values[i], 0.0);
        } else {
          cfg.omega = cfg.nu + values[i];
        }
        const ScenarioResult result = run_scenario(cfg);
        point.exit_code = result.exit_code;
        point.report = {
            {"value", values[i]},
            {"status", result.report.at("status")},
            {"exit_code", result.exit_code},
            {"residual_norm", result.report.at("riccati").at("residual_norm")},
            {"max_drift", result.report.at("series").at("max_drift")},
            {"min_fidelity", result.report.at("series").at("min_fidelity")},
            {"leak_max", result.report.at("series").at("leak_max")}};
      } catch (const ConfigError& e) {
        point.exit_code = 2;
        point.report = {{"value", values[i]},
                        {"status", "config-error"},
                        {"exit_code", 2},
                        {"error", e.what()}};
      } catch (const NumericalError& e) {
        point.exit_code = 3;
        point.report = {{"value", values[i]},
                        {"status", "numerical-error"},
                        {"exit_code", 3},
                        {"error", e.what()}};
      } catch (const std::exception& e) {
        point.exit_code = 3;
        point.report = {{"value", values[i]},
                        {"status", "numerical-error"},
                        {"exit_code", 3},
                        {"error", e.what()}};
      }
    }
  };

  const int workers = std::min<int>(max_threads(),
                                    static_cast<int>(values.size()));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back(work);
    }
    for (auto& th : pool) {
      th.join();
    }
  }

  bool any1 = false;
  bool any2 = false;
  bool any3 = false;
  for (const auto& point : sweep.points) {
    any1 |= point.exit_code == 1;
    any2 |= point.exit_code == 2;
    any3 |= point.exit_code == 3;
  }
  sweep.exit_code = any2 ? 2 : any3 ? 3 : any1 ? 1 : 0;
  return sweep;
}

void emit_timeseries(const TimeSeries& series, const fs::path& path) {
  std::string out = "t,lambda_expect,alpha,c_re,c_im,fidelity,leakage\n";
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    out += format_double(series.times[i]);
    out += ',';
    out += format_double(series.lambda_expect[i]);
    out += ',';
    out += format_double(series.alpha[i]);
    out += ',';
    out += format_double(series.coherence[i].real());
    out += ',';
    out += format_double(series.coherence[i].imag());
    out += ',';
    out += format_double(series.fidelity[i]);
    out += ',';
    out += format_double(series.leakage[i]);
    out += '\n';
  }
  write_atomic(path, out);
}

void emit_report(const OrderedJson& report, const fs::path& path) {
  write_atomic(path, report.dump(2) + "\n");
}

void emit_sweep(const SweepResult& sweep, const fs::path& path) {
  std::string out = "value,residual_norm,max_drift,min_fidelity,leak_max,status\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& point : sweep.points) {
    const auto field = [&point, nan](const char* key) {
      return point.report.contains(key) ? point.report.at(key).get<double>()
                                        : nan;
    };
    out += format_double(point.value);
    out += ',';
    out += format_double(field("residual_norm"));
    out += ',';
    out += format_double(field("max_drift"));
    out += ',';
    out += format_double(field("min_fidelity"));
    out += ',';
    out += format_double(field("leak_max"));
    out += ',';
    out += std::to_string(point.exit_code);
    out += '\n';
  }
  write_atomic(path, out);
}

int max_threads() {
  const char* env = std::getenv("CQS_THREADS");
  if (env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) {
      throw ConfigError("CQS_THREADS must be a positive integer");
    }
    return static_cast<int>(std::min<long>(v, 256));
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace cqs
