#include "ltqd/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ltqd/basis.hpp"
#include "ltqd/dynamics.hpp"
#include "ltqd/errors.hpp"
#include "ltqd/hs.hpp"
#include "ltqd/models.hpp"
#include "ltqd/spectral.hpp"
#include "ltqd/superop.hpp"
#include "ltqd/synthetic.hpp"
#include "ltqd/tqd.hpp"
#include "ltqd/version.hpp"

namespace ltqd {

namespace {

using nlohmann::json;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// --- config ----------------------------------------------------------------

enum class ModelKind { deutsch, landau_zener, custom };

struct SweepCfg {
  std::string variable;
  std::vector<double> values;
};

struct Config {
  ModelKind model = ModelKind::deutsch;
  DeutschParams dp;
  LZParams lp;
  std::string custom_path;
  double custom_omega_ref = 1.0;
  std::string drive = "adiabatic_me";
  int n_steps = 0;  // 0 = automatic
  std::optional<SweepCfg> sweep;
  std::string out_path;
  bool self_check = false;
  bool debug_corrupt_lefts = false;
};

const char* model_name(ModelKind m) {
  switch (m) {
    case ModelKind::deutsch: return "deutsch";
    case ModelKind::landau_zener: return "landau_zener";
    default: return "custom_file";
  }
}

double require_number(const json& j, const std::string& key, double fallback,
                      bool* present = nullptr) {
  if (!j.contains(key)) {
    if (present) *present = false;
    return fallback;
  }
  if (present) *present = true;
  if (!j.at(key).is_number()) {
    throw ContractError("config: '" + key + "' must be a number");
  }
  return j.at(key).get<double>();
}

int require_int(const json& j, const std::string& key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) {
    throw ContractError("config: '" + key + "' must be an integer");
  }
  return j.at(key).get<int>();
}

std::string require_string(const json& j, const std::string& key,
                           const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) {
    throw ContractError("config: '" + key + "' must be a string");
  }
  return j.at(key).get<std::string>();
}

Config parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ContractError("config file not found: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ContractError("config is not valid JSON (" + std::string(e.what()) +
                        ")");
  }
  if (!j.is_object()) throw ContractError("config root must be a JSON object");

  Config cfg;
  const std::string model = require_string(j, "model", "");
  if (model == "deutsch") {
    cfg.model = ModelKind::deutsch;
  } else if (model == "landau_zener") {
    cfg.model = ModelKind::landau_zener;
  } else if (model == "custom_file") {
    cfg.model = ModelKind::custom;
  } else {
    throw ContractError(
        "config: 'model' must be one of deutsch | landau_zener | custom_file");
  }

  const json params = j.value("params", json::object());
  if (!params.is_object()) throw ContractError("config: 'params' must be an object");
  switch (cfg.model) {
    case ModelKind::deutsch:
      cfg.dp.omega = require_number(params, "omega", cfg.dp.omega);
      cfg.dp.gamma0 = require_number(params, "gamma0", cfg.dp.gamma0);
      cfg.dp.tau = require_number(params, "tau", cfg.dp.tau);
      cfg.dp.f0 = require_int(params, "f0", cfg.dp.f0);
      cfg.dp.f1 = require_int(params, "f1", cfg.dp.f1);
      break;
    case ModelKind::landau_zener: {
      cfg.lp.omega0 = require_number(params, "omega0", cfg.lp.omega0);
      cfg.lp.gamma0 = require_number(params, "gamma0", cfg.lp.gamma0);
      cfg.lp.tau = require_number(params, "tau", cfg.lp.tau);
      cfg.lp.theta0 = require_number(params, "theta0", cfg.lp.theta0);
      const std::string mode = require_string(params, "gamma_mode", "sec_theta");
      if (mode == "constant") {
        cfg.lp.gamma_mode = GammaMode::constant;
      } else if (mode == "sec_theta") {
        cfg.lp.gamma_mode = GammaMode::sec_theta;
      } else {
        throw ContractError(
            "config: 'gamma_mode' must be constant | sec_theta");
      }
      break;
    }
    case ModelKind::custom: {
      cfg.custom_path = require_string(params, "path", "");
      if (cfg.custom_path.empty()) {
        throw ContractError("config: custom_file model needs params.path");
      }
      std::ifstream probe(cfg.custom_path);
      if (!probe) {
        throw ContractError("config: model file not found: " + cfg.custom_path);
      }
      cfg.custom_omega_ref =
          require_number(params, "omega_ref", cfg.custom_omega_ref);
      if (!(cfg.custom_omega_ref > 0)) {
        throw ContractError("config: omega_ref must be > 0");
      }
      break;
    }
  }

  const json grid = j.value("grid", json::object());
  if (!grid.is_object()) throw ContractError("config: 'grid' must be an object");
  cfg.n_steps = require_int(grid, "n_steps", 0);
  if (cfg.n_steps < 0) throw ContractError("config: grid.n_steps must be > 0");
  bool tau_present = false;
  const double tau = require_number(grid, "tau", 0.0, &tau_present);
  if (tau_present) {
    if (!(tau > 0)) throw ContractError("config: grid.tau must be > 0");
    cfg.dp.tau = tau;
    cfg.lp.tau = tau;
  } else if (cfg.model == ModelKind::custom) {
    throw ContractError("config: custom_file model needs grid.tau");
  }
  if (cfg.model == ModelKind::custom) cfg.dp.tau = cfg.lp.tau = tau;

  cfg.drive = require_string(j, "drive", cfg.drive);
  static const std::vector<std::string> kDrives{
      "adiabatic_me", "standard_tqd", "generalized_tqd", "adiabatic_target"};
  if (std::find(kDrives.begin(), kDrives.end(), cfg.drive) == kDrives.end()) {
    throw ContractError(
        "config: 'drive' must be one of adiabatic_me | standard_tqd | "
        "generalized_tqd | adiabatic_target");
  }

  if (j.contains("sweep")) {
    const json& sj = j.at("sweep");
    if (!sj.is_object()) throw ContractError("config: 'sweep' must be an object");
    SweepCfg sc;
    sc.variable = require_string(sj, "variable", "");
    if (!sj.contains("values") || !sj.at("values").is_array() ||
        sj.at("values").empty()) {
      throw ContractError("config: sweep.values must be a nonempty array");
    }
    for (const auto& v : sj.at("values")) {
      if (!v.is_number()) throw ContractError("config: sweep.values must be numbers");
      sc.values.push_back(v.get<double>());
    }
    std::vector<std::string> allowed;
    switch (cfg.model) {
      case ModelKind::deutsch:
        allowed = {"omega_tau", "tau", "gamma0", "omega"};
        break;
      case ModelKind::landau_zener:
        allowed = {"omega_tau", "tau", "gamma0", "theta0", "omega0"};
        break;
      case ModelKind::custom:
        throw ContractError("config: the custom_file model has no sweepable parameters");
    }
    if (std::find(allowed.begin(), allowed.end(), sc.variable) == allowed.end()) {
      std::string names;
      for (const auto& n : allowed) names += (names.empty() ? "" : " | ") + n;
      throw ContractError("config: sweep.variable '" + sc.variable +
                          "' does not name a model parameter (" + names + ")");
    }
    cfg.sweep = std::move(sc);
  }

  const json output = j.value("output", json::object());
  if (!output.is_object()) throw ContractError("config: 'output' must be an object");
  cfg.out_path = require_string(output, "path", "");

  if (j.contains("self_check")) {
    if (!j.at("self_check").is_boolean()) {
      throw ContractError("config: 'self_check' must be a boolean");
    }
    cfg.self_check = j.at("self_check").get<bool>();
  }
  const json debug = j.value("debug", json::object());
  if (debug.is_object() && debug.contains("corrupt_lefts")) {
    cfg.debug_corrupt_lefts = debug.at("corrupt_lefts").get<bool>();
  }
  return cfg;
}

void apply_sweep_value(Config& cfg, const std::string& var, double v) {
  if (cfg.model == ModelKind::deutsch) {
    if (var == "omega_tau") cfg.dp.tau = v / cfg.dp.omega;
    else if (var == "tau") cfg.dp.tau = v;
    else if (var == "gamma0") cfg.dp.gamma0 = v;
    else if (var == "omega") cfg.dp.omega = v;
  } else {
    if (var == "omega_tau") cfg.lp.tau = v / cfg.lp.omega0;
    else if (var == "tau") cfg.lp.tau = v;
    else if (var == "gamma0") cfg.lp.gamma0 = v;
    else if (var == "theta0") cfg.lp.theta0 = v;
    else if (var == "omega0") cfg.lp.omega0 = v;
  }
}

json resolved_config_json(const Config& cfg, int n_steps_used,
                          const std::string& out_path) {
  json p;
  switch (cfg.model) {
    case ModelKind::deutsch:
      p = {{"omega", cfg.dp.omega}, {"gamma0", cfg.dp.gamma0},
           {"tau", cfg.dp.tau},     {"f0", cfg.dp.f0},
           {"f1", cfg.dp.f1}};
      break;
    case ModelKind::landau_zener:
      p = {{"omega0", cfg.lp.omega0},
           {"gamma0", cfg.lp.gamma0},
           {"tau", cfg.lp.tau},
           {"theta0", cfg.lp.theta0},
           {"gamma_mode", cfg.lp.gamma_mode == GammaMode::constant
                              ? "constant"
                              : "sec_theta"}};
      break;
    case ModelKind::custom:
      p = {{"path", cfg.custom_path},
           {"omega_ref", cfg.custom_omega_ref},
           {"tau", cfg.lp.tau}};
      break;
  }
  json out{{"model", model_name(cfg.model)},
           {"params", p},
           {"drive", cfg.drive},
           {"grid", {{"n_steps", n_steps_used}}},
           {"output", {{"path", out_path}, {"format", "csv"}}},
           {"self_check", cfg.self_check}};
  if (cfg.sweep) {
    out["sweep"] = {{"variable", cfg.sweep->variable},
                    {"values", cfg.sweep->values}};
  }
  return out;
}

// --- model runtime ---------------------------------------------------------

// Everything a command needs, regardless of which model the config selected.
struct ModelRuntime {
  double omega_ref = 1.0;
  double tau = 0.0;
  Vec initial;
  // Chosen drive generator; adiabatic_target has none (nullopt).
  std::function<std::optional<Superop>(const std::string&)> drive_op;
  // Slow-drive reference states on a grid (closed form for the built-in
  // models, branch-following propagator for custom files).
  std::function<std::vector<Vec>(const TimeGrid&)> reference_states;
  std::function<Vec(const TimeGrid&)> target_state;
  // Eigenvector path with derivatives (analytic for the built-in models).
  std::function<SpectralPath(const TimeGrid&)> spectrum;
};

const OperatorBasis& pauli_basis() {
  static const OperatorBasis basis = OperatorBasis::pauli();
  return basis;
}

// Piecewise-linear sample table (t strictly increasing), constant beyond the
// ends.
struct Table {
  std::vector<double> ts, vs;

  double eval(double t) const {
    if (t <= ts.front()) return vs.front();
    if (t >= ts.back()) return vs.back();
    const auto it = std::upper_bound(ts.begin(), ts.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - ts.begin());
    const double w = (t - ts[hi - 1]) / (ts[hi] - ts[hi - 1]);
    return (1.0 - w) * vs[hi - 1] + w * vs[hi];
  }
};

Table parse_table(const json& arr, const std::string& what) {
  if (!arr.is_array() || arr.empty()) {
    throw ContractError("model file: " + what +
                        " must be a nonempty array of [t, value] pairs");
  }
  Table tab;
  for (const auto& row : arr) {
    if (!row.is_array() || row.size() != 2 || !row[0].is_number() ||
        !row[1].is_number()) {
      throw ContractError("model file: " + what + " rows must be [t, value]");
    }
    tab.ts.push_back(row[0].get<double>());
    tab.vs.push_back(row[1].get<double>());
  }
  for (std::size_t i = 1; i < tab.ts.size(); ++i) {
    if (!(tab.ts[i] > tab.ts[i - 1])) {
      throw ContractError("model file: " + what + " times must be strictly increasing");
    }
  }
  return tab;
}

int pauli_index(const std::string& label) {
  if (label == "i") return 0;
  if (label == "x") return 1;
  if (label == "y") return 2;
  if (label == "z") return 3;
  throw ContractError("model file: Pauli label must be one of i | x | y | z, got '" +
                      label + "'");
}

// User model file: {"hamiltonian": {"x": [[t, c], ...], ...},
//                   "channels": [{"pauli": "z", "rate": [[t, r], ...]}, ...],
//                   "initial": [c_i, c_x, c_y, c_z]}  (initial optional)
struct CustomModel {
  LindbladSpec spec;
  Vec initial;
};

CustomModel load_custom_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ContractError("model file not found: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ContractError("model file is not valid JSON (" + std::string(e.what()) + ")");
  }

  CustomModel m;
  const json ham = j.value("hamiltonian", json::object());
  if (!ham.is_object()) {
    throw ContractError("model file: 'hamiltonian' must be an object of Pauli tables");
  }
  auto coeffs = std::make_shared<std::vector<std::pair<int, Table>>>();
  for (const auto& [label, table] : ham.items()) {
    coeffs->emplace_back(pauli_index(label), parse_table(table, "hamiltonian." + label));
  }
  m.spec.hamiltonian = [coeffs](double t) {
    Mat h = Mat::Zero(2, 2);
    for (const auto& [idx, tab] : *coeffs) {
      h += tab.eval(t) * pauli_basis().element(idx);
    }
    return h;
  };

  const json channels = j.value("channels", json::array());
  if (!channels.is_array()) throw ContractError("model file: 'channels' must be an array");
  for (const auto& ch : channels) {
    if (!ch.is_object()) throw ContractError("model file: channels entries must be objects");
    const int idx = pauli_index(require_string(ch, "pauli", ""));
    if (idx == 0) throw ContractError("model file: a channel jump cannot be the identity");
    if (!ch.contains("rate")) throw ContractError("model file: channel needs a rate table");
    auto tab = std::make_shared<Table>(parse_table(ch.at("rate"), "channel rate"));
    m.spec.channels.push_back(
        {pauli_basis().element(idx), [tab](double t) { return tab->eval(t); }});
  }

  m.initial = Vec::Zero(4);
  m.initial(0) = 1.0;
  if (j.contains("initial")) {
    const json& init = j.at("initial");
    if (!init.is_array() || init.size() != 4) {
      throw ContractError("model file: 'initial' must be an array of 4 components");
    }
    for (int n = 0; n < 4; ++n) m.initial(n) = init[n].get<double>();
  }
  return m;
}

SpectralPath numeric_spectrum(const Superop& op, const TimeGrid& grid) {
  SpectralPath path = eigensystem_path(op, grid);
  gauge_smooth(path);
  differentiate_path(path);
  return path;
}

ModelRuntime make_runtime(const Config& cfg) {
  ModelRuntime rt;
  switch (cfg.model) {
    case ModelKind::deutsch: {
      const DeutschParams p = cfg.dp;
      DeutschVariants v = deutsch_variants(p);
      rt.omega_ref = p.omega;
      rt.tau = p.tau;
      rt.initial = v.initial_state;
      rt.drive_op = [v](const std::string& drive) -> std::optional<Superop> {
        if (drive == "adiabatic_me") return v.L_adiabatic;
        if (drive == "standard_tqd") return v.L_standard_tqd;
        if (drive == "generalized_tqd") return v.L_generalized_ti;
        return std::nullopt;
      };
      auto sol = v.adiabatic_solution;
      rt.reference_states = [sol](const TimeGrid& grid) {
        std::vector<Vec> out;
        out.reserve(grid.size());
        for (std::size_t jj = 0; jj < grid.size(); ++jj) {
          out.push_back(sol(grid.point(static_cast<int>(jj))));
        }
        return out;
      };
      rt.target_state = [v](const TimeGrid&) { return v.target_state; };
      rt.spectrum = [p](const TimeGrid& grid) {
        return deutsch_analytic_spectrum(p, grid);
      };
      break;
    }
    case ModelKind::landau_zener: {
      const LZParams p = cfg.lp;
      const Superop base = lz_lindbladian(p);
      const Superop cd = lz_standard_cd(p);
      const Superop standard(
          4, [base, cd](double t) { return Mat(base.at(t) + cd.at(t)); },
          "lz_standard_tqd");
      rt.omega_ref = p.omega0;
      rt.tau = p.tau;
      rt.initial = Vec(4);
      rt.initial << 1.0, 0.0, 0.0, -1.0;
      rt.drive_op = [p, base,
                     standard](const std::string& drive) -> std::optional<Superop> {
        if (drive == "adiabatic_me") return base;
        if (drive == "standard_tqd") return standard;
        if (drive == "generalized_tqd") return lz_generalized(p);
        return std::nullopt;
      };
      rt.reference_states = [p](const TimeGrid& grid) {
        std::vector<Vec> out;
        out.reserve(grid.size());
        for (std::size_t jj = 0; jj < grid.size(); ++jj) {
          const double t = grid.point(static_cast<int>(jj));
          const double decay = std::exp(-2.0 * p.gamma_integral(t));
          const double th = p.theta(t);
          Vec x(4);
          x << 1.0, -decay * std::sin(th), 0.0, -decay * std::cos(th);
          out.push_back(std::move(x));
        }
        return out;
      };
      rt.target_state = [p](const TimeGrid&) {
        const double decay = std::exp(-2.0 * p.gamma_integral(p.tau));
        const double th = p.theta(p.tau);
        Vec x(4);
        x << 1.0, -decay * std::sin(th), 0.0, -decay * std::cos(th);
        return x;
      };
      rt.spectrum = [p](const TimeGrid& grid) {
        return lz_analytic_spectrum(p, grid);
      };
      break;
    }
    case ModelKind::custom: {
      auto model = std::make_shared<CustomModel>(load_custom_model(cfg.custom_path));
      const Superop op = build_superop(model->spec, pauli_basis(), "custom");
      rt.omega_ref = cfg.custom_omega_ref;
      rt.tau = cfg.lp.tau;
      rt.initial = model->initial;
      const double tau = rt.tau;
      // Spectral constructions for custom models run on a fixed support grid
      // and interpolate, so the drive generator is defined for every t.
      auto support = std::make_shared<SpectralPath>(
          numeric_spectrum(op, TimeGrid{0.0, tau, 400}));
      rt.drive_op = [op, support](const std::string& drive) -> std::optional<Superop> {
        if (drive == "adiabatic_me") return op;
        if (drive == "standard_tqd") {
          const Superop cd = standard_cd(*support);
          return Superop(4, [op, cd](double t) { return Mat(op.at(t) + cd.at(t)); },
                         "custom_standard_tqd");
        }
        if (drive == "generalized_tqd") {
          return generalized_tqd_1d(*support, stationary_drive_phases(*support));
        }
        return std::nullopt;
      };
      rt.reference_states = [op, model](const TimeGrid& grid) {
        SpectralPath path = numeric_spectrum(op, grid);
        return adiabatic_propagator_1d(path).apply(model->initial);
      };
      rt.target_state = [rt_ref = rt.reference_states](const TimeGrid& grid) {
        return rt_ref(grid).back();
      };
      rt.spectrum = [op](const TimeGrid& grid) { return numeric_spectrum(op, grid); };
      break;
    }
  }
  return rt;
}

// --- output helpers --------------------------------------------------------

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  if (path.empty()) throw ContractError("no output path: set output.path or pass --out");
  std::ofstream out(path);
  if (!out) throw ContractError("cannot open output file: " + path);
  for (const auto& line : lines) out << line << '\n';
}

std::vector<std::string> csv_prelude(const Config& cfg, int n_steps_used,
                                     const std::string& out_path) {
  return {std::string("# tool: ltqd ") + kVersion,
          "# config: " + resolved_config_json(cfg, n_steps_used, out_path).dump()};
}

// --- commands --------------------------------------------------------------

int spectrum_steps(const Config& cfg) { return cfg.n_steps > 0 ? cfg.n_steps : 400; }

int evolve_steps(const Config& cfg, const ModelRuntime& rt) {
  return cfg.n_steps > 0 ? cfg.n_steps
                         : default_steps(0.0, rt.tau, rt.omega_ref);
}

void cmd_spectrum(const Config& cfg, const std::string& out) {
  const ModelRuntime rt = make_runtime(cfg);
  const int n = spectrum_steps(cfg);
  const TimeGrid grid{0.0, rt.tau, n};
  const SpectralPath path = rt.spectrum(grid);

  std::vector<std::string> lines = csv_prelude(cfg, n, out);
  std::string header = "t";
  for (int a = 0; a < 4; ++a) {
    header += ",re_lambda" + std::to_string(a) + ",im_lambda" + std::to_string(a);
  }
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      header += ",re_g" + std::to_string(a) + std::to_string(b) +
                ",im_g" + std::to_string(a) + std::to_string(b);
    }
  }
  lines.push_back(std::move(header));

  for (std::size_t j = 0; j < grid.size(); ++j) {
    const int jj = static_cast<int>(j);
    std::string row = fmt17(rt.omega_ref * grid.point(jj));
    for (int a = 0; a < 4; ++a) {
      row += "," + fmt17(path.eigenvalues[j](a).real());
      row += "," + fmt17(path.eigenvalues[j](a).imag());
    }
    const Mat g = overlap_matrix(path, jj);
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        row += "," + fmt17(g(a, b).real());
        row += "," + fmt17(g(a, b).imag());
      }
    }
    lines.push_back(std::move(row));
  }
  write_lines(out, lines);
}

void cmd_evolve(const Config& cfg, const std::string& out) {
  const ModelRuntime rt = make_runtime(cfg);
  const int n = evolve_steps(cfg, rt);
  const TimeGrid grid{0.0, rt.tau, n};
  const std::vector<Vec> reference = rt.reference_states(grid);

  std::vector<Vec> states;
  std::vector<double> trace_dev(grid.size(), 0.0);
  std::vector<double> pur(grid.size(), 0.0);
  const std::optional<Superop> op = rt.drive_op(cfg.drive);
  if (op) {
    IntegrateOptions opts;
    opts.self_check = cfg.self_check;
    const Trajectory traj = integrate(*op, rt.initial, grid, pauli_basis(), opts);
    states = traj.states;
    trace_dev = traj.trace_dev;
    pur = traj.purity;
  } else {
    states = reference;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      pur[j] = purity(devectorize(states[j], pauli_basis()));
    }
  }

  std::vector<std::string> lines = csv_prelude(cfg, n, out);
  lines.push_back("t,x,y,z,purity,trace_dev,fidelity_vs_adiabatic");
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const int jj = static_cast<int>(j);
    const double fid = fidelity(devectorize(states[j], pauli_basis()),
                                devectorize(reference[j], pauli_basis()));
    std::string row = fmt17(rt.omega_ref * grid.point(jj));
    for (int c = 1; c <= 3; ++c) row += "," + fmt17(states[j](c).real());
    row += "," + fmt17(pur[j]);
    row += "," + fmt17(trace_dev[j]);
    row += "," + fmt17(fid);
    lines.push_back(std::move(row));
  }
  write_lines(out, lines);
}

void cmd_sweep(const Config& cfg, const std::string& out) {
  if (!cfg.sweep) throw ContractError("sweep needs a 'sweep' config block");
  static const std::vector<std::string> kDrives{
      "adiabatic_me", "standard_tqd", "generalized_tqd", "adiabatic_target"};

  auto run_value = [&cfg](double v) {
    Config local = cfg;
    apply_sweep_value(local, cfg.sweep->variable, v);
    const ModelRuntime rt = make_runtime(local);
    const int n = evolve_steps(local, rt);
    const TimeGrid grid{0.0, rt.tau, n};
    const Mat target = devectorize(rt.target_state(grid), pauli_basis());

    std::vector<std::string> rows;
    for (const auto& drive : kDrives) {
      double fid = 0.0;
      const std::optional<Superop> op = rt.drive_op(drive);
      if (op) {
        const Trajectory traj =
            integrate(*op, rt.initial, grid, pauli_basis(), {});
        fid = fidelity(devectorize(traj.states.back(), pauli_basis()), target);
      } else {
        fid = fidelity(target, target);
      }
      std::string row = fmt17(v) + "," + fmt17(rt.omega_ref * rt.tau) + "," +
                        drive + "," + fmt17(fid);
      rows.push_back(std::move(row));
    }
    return rows;
  };

  // Sweep points run concurrently; rows are gathered in config order so the
  // output is deterministic.
  std::vector<std::future<std::vector<std::string>>> futures;
  futures.reserve(cfg.sweep->values.size());
  for (const double v : cfg.sweep->values) {
    futures.push_back(std::async(std::launch::async, run_value, v));
  }

  std::vector<std::string> lines = csv_prelude(cfg, cfg.n_steps, out);
  lines.push_back(cfg.sweep->variable == "omega_tau"
                      ? "omega_tau,_omega_tau,drive,fidelity"
                      : cfg.sweep->variable + ",omega_tau,drive,fidelity");
  // The duplicated omega_tau column keeps the layout identical across sweep
  // variables; rename the first column instead when sweeping omega_tau.
  if (cfg.sweep->variable == "omega_tau") {
    lines.back() = "omega_tau,drive,fidelity";
  }
  for (auto& fut : futures) {
    for (auto& row : fut.get()) {
      if (cfg.sweep->variable == "omega_tau") {
        // drop the duplicate leading value column
        row = row.substr(row.find(',') + 1);
      }
      lines.push_back(std::move(row));
    }
  }
  write_lines(out, lines);
}

// --- verify ----------------------------------------------------------------

struct CheckResult {
  std::string name;
  std::string status;  // pass | fail | info
  double residual = 0.0;
  double tolerance = 0.0;
  std::string note;
};

CheckResult bounded(const std::string& name, double residual, double tol,
                    std::string note = {}) {
  return {name, residual <= tol ? "pass" : "fail", residual, tol, std::move(note)};
}

CheckResult info(const std::string& name, double residual, std::string note) {
  return {name, "info", residual, 0.0, std::move(note)};
}

double max_superop_diff(const Superop& a, const Superop& b, const TimeGrid& grid,
                        int stride = 1) {
  double worst = 0.0;
  for (std::size_t j = 0; j < grid.size(); j += stride) {
    const double t = grid.point(static_cast<int>(j));
    worst = std::max(worst, (a.at(t) - b.at(t)).cwiseAbs().maxCoeff());
  }
  return worst;
}

// Branch-following phases Lambda_a(t_j) = lambda_a - <<E_a|Ddot_a>> sampled
// from a path; exact at grid nodes (the only places the synthesizers
// evaluate them).
PhaseProfile sampled_adiabatic_phases(const SpectralPath& path) {
  const int nb = path.n_branches();
  auto ts = std::make_shared<std::vector<double>>();
  auto vals = std::make_shared<std::vector<Vec>>();
  for (std::size_t j = 0; j < path.grid.size(); ++j) {
    const int jj = static_cast<int>(j);
    ts->push_back(path.grid.point(jj));
    const Mat g = overlap_matrix(path, jj);
    Vec lam(nb);
    for (int a = 0; a < nb; ++a) lam(a) = path.eigenvalues[j](a) - g(a, a);
    vals->push_back(std::move(lam));
  }
  PhaseProfile profile;
  for (int a = 0; a < nb; ++a) {
    profile.phases.push_back([ts, vals, a](double t) {
      const auto it = std::lower_bound(ts->begin(), ts->end(), t);
      if (it == ts->end()) return (*vals).back()(a);
      const std::size_t hi = static_cast<std::size_t>(it - ts->begin());
      if (*it == t || hi == 0) return (*vals)[hi](a);
      const double w = (t - (*ts)[hi - 1]) / ((*ts)[hi] - (*ts)[hi - 1]);
      return (1.0 - w) * (*vals)[hi - 1](a) + w * (*vals)[hi](a);
    });
  }
  return profile;
}

// Largest |<<E_b(t)|x(t)>>| over the grid for all b != a when transporting
// each branch vector D_a(0) under the drive: exact transport keeps every
// branch inside its own block.
double cross_block_leakage(const Superop& drive, const SpectralPath& path) {
  double worst = 0.0;
  IntegrateOptions opts;
  opts.with_monitors = false;
  for (int a = 0; a < path.n_branches(); ++a) {
    const Vec x0 = path.rights[0].col(a);
    const Trajectory traj = integrate(drive, x0, path.grid, pauli_basis(), opts);
    for (std::size_t j = 0; j < path.grid.size(); ++j) {
      for (int b = 0; b < path.n_branches(); ++b) {
        if (b == a) continue;
        worst = std::max(
            worst, std::abs(pair_lr(path.lefts[j].row(b), traj.states[j])));
      }
    }
  }
  return worst;
}

// Per-point best matching of analytic to numeric branches by eigenvalue
// distance, then the largest projector mismatch.
double projector_mismatch(const SpectralPath& analytic, const SpectralPath& numeric) {
  double worst = 0.0;
  for (std::size_t j = 0; j < analytic.grid.size(); ++j) {
    const int jj = static_cast<int>(j);
    for (int a = 0; a < analytic.n_branches(); ++a) {
      int best = 0;
      double best_d = std::abs(analytic.eigenvalues[j](a) - numeric.eigenvalues[j](0));
      for (int b = 1; b < numeric.n_branches(); ++b) {
        const double d = std::abs(analytic.eigenvalues[j](a) - numeric.eigenvalues[j](b));
        if (d < best_d) {
          best_d = d;
          best = b;
        }
      }
      worst = std::max(worst, (analytic.projector(jj, a) - numeric.projector(jj, best))
                                  .cwiseAbs()
                                  .maxCoeff());
    }
  }
  return worst;
}

std::vector<CheckResult> synthetic_checks(bool corrupt) {
  std::vector<CheckResult> out;

  // Chain-transport ODE residual, checked with an independent five-point
  // finite difference on the interior of the grid.
  {
    const TimeGrid grid{0.0, 1.0, 4000};
    const SyntheticHarness h = make_synthetic_harness(grid);
    const JordanStructure& js = corrupt ? corrupt_lefts(h.structure) : h.structure;
    out.push_back(bounded("jordan_biorthonormality", js.biorthonormality_residual(),
                          1e-8));

    double worst = 0.0;
    const double dt = grid.dt();
    for (int block = 0; block < 3; ++block) {
      const std::vector<Mat> v = block_v_coefficients(h.structure, block);
      const int k = h.structure.blocks[block].rank();
      Mat shift = Mat::Zero(k, k);
      for (int r = 0; r + 1 < k; ++r) shift(r, r + 1) = 1.0;
      for (std::size_t j = 2; j + 2 < grid.size(); ++j) {
        const Mat vdot =
            (v[j - 2] - 8.0 * v[j - 1] + 8.0 * v[j + 1] - v[j + 2]) / (12.0 * dt);
        const Mat g = h.structure.blocks[block].lefts[j] *
                      h.structure.blocks[block].rights_dot[j];
        worst = std::max(worst, (vdot - (shift - g) * v[j]).cwiseAbs().maxCoeff());
      }
    }
    out.push_back(bounded("v_ode_residual", worst, 1e-7));
  }

  // Coefficient-based synthesis against generator + counterdiabatic term.
  {
    const TimeGrid grid{0.0, 1.0, 40000};
    const SyntheticHarness h = make_synthetic_harness(grid);
    const Superop lhs = generalized_tqd_multiblock(
        h.structure, adiabatic_block_coefficients(h.structure));
    const Superop cd = standard_cd(h.structure);
    const Superop rhs(
        4, [&h, &cd](double t) { return Mat(h.op.at(t) + cd.at(t)); }, "");
    out.push_back(bounded("multiblock_recovery",
                          max_superop_diff(lhs, rhs, grid, 100), 1e-8));
  }
  return out;
}

int cmd_verify(const Config& cfg, const std::string& out) {
  const ModelRuntime rt = make_runtime(cfg);
  const int n = cfg.n_steps > 0 ? cfg.n_steps : 400;
  const TimeGrid grid{0.0, rt.tau, n};
  std::vector<CheckResult> checks;

  const std::optional<Superop> adiabatic = rt.drive_op("adiabatic_me");
  const std::optional<Superop> standard = rt.drive_op("standard_tqd");
  const SpectralPath path = rt.spectrum(grid);

  SpectralPath numeric = eigensystem_path(*adiabatic, grid);
  gauge_smooth(numeric);
  checks.push_back(
      bounded("numeric_biorthonormality", numeric.biorthonormality_residual(), 1e-8));
  checks.push_back(
      bounded("numeric_completeness", numeric.completeness_residual(), 1e-8));
  if (cfg.model != ModelKind::custom) {
    checks.push_back(
        bounded("analytic_vs_numeric_projectors", projector_mismatch(path, numeric), 1e-8));
  }

  checks.push_back(bounded(
      "cd_two_route",
      max_superop_diff(standard_cd(path), standard_cd_via_similarity(path), grid),
      1e-8));

  {
    const Superop lhs = generalized_tqd_1d(path, sampled_adiabatic_phases(path));
    const double tol = cfg.model == ModelKind::deutsch ? 1e-9 : 1e-8;
    checks.push_back(bounded(
        "adiabatic_phase_recovery",
        max_superop_diff(lhs, *standard, grid), tol));
  }

  const StationarityReport st = stationarity_check(path);
  checks.push_back(info(
      "overlap_transport", st.max_transport_residual,
      st.transport_holds ? "holds: a time-independent generalized drive exists"
                         : "not satisfied: no time-independent phase choice"));

  {
    double worst = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const Mat g = overlap_matrix(path, static_cast<int>(j));
      for (int a = 0; a < 4; ++a) worst = std::max(worst, std::abs(g(a, a)));
    }
    const bool expected_zero =
        cfg.model == ModelKind::deutsch ||
        (cfg.model == ModelKind::landau_zener &&
         cfg.lp.gamma_mode == GammaMode::sec_theta);
    if (expected_zero) {
      checks.push_back(bounded("parallel_transport", worst, 1e-10));
    } else {
      checks.push_back(info("parallel_transport", worst,
                            "diagonal overlaps not expected to vanish here"));
    }
  }

  if (cfg.model == ModelKind::deutsch) {
    const DeutschVariants v = deutsch_variants(cfg.dp);
    const Superop rebuilt = deutsch_generalized(
        cfg.dp, [g = cfg.dp.gamma0](double) { return Complex(-2.0 * g); });
    checks.push_back(bounded(
        "time_independent_matrix",
        max_superop_diff(rebuilt, v.L_generalized_ti, grid), 1e-9));
    const ConstancyReport cr = time_independence_residual(v.L_generalized_ti, grid);
    checks.push_back(bounded("time_independent_residual", cr.residual,
                             std::max(cr.tolerance, 1e-300)));
    checks.push_back(
        bounded("block_decoupling", cross_block_leakage(*standard, path), 1e-6));
  }

  for (CheckResult& c : synthetic_checks(cfg.debug_corrupt_lefts)) {
    checks.push_back(std::move(c));
  }

  bool all_pass = true;
  for (const auto& c : checks) {
    if (c.status == "fail") all_pass = false;
    std::string line = "[" + std::string(c.status == "pass"
                                             ? "PASS"
                                             : (c.status == "fail" ? "FAIL" : "INFO")) +
                       "] " + c.name + "  residual=" + fmt17(c.residual);
    if (c.status != "info") line += "  tol=" + fmt17(c.tolerance);
    if (!c.note.empty()) line += "  (" + c.note + ")";
    std::cout << line << '\n';
  }
  std::cout << (all_pass ? "VERIFY: OK" : "VERIFY: FAILED") << '\n';

  if (!out.empty()) {
    json report{{"tool", std::string("ltqd ") + kVersion},
                {"model", model_name(cfg.model)},
                {"all_pass", all_pass},
                {"checks", json::array()}};
    for (const auto& c : checks) {
      json jc{{"name", c.name},
              {"status", c.status},
              {"residual", c.residual}};
      if (c.status != "info") jc["tolerance"] = c.tolerance;
      if (!c.note.empty()) jc["note"] = c.note;
      report["checks"].push_back(std::move(jc));
    }
    std::ofstream f(out);
    if (!f) throw ContractError("cannot open output file: " + out);
    f << report.dump(2) << '\n';
  }
  return all_pass ? kExitOk : kExitVerify;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Coherence-vector Lindblad dynamics and transitionless-drive "
               "synthesis"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  bool self_check = false;
  app.add_flag("--self-check", self_check,
               "re-run integrations at doubled resolution and compare");

  struct Sub {
    CLI::App* cmd;
    std::string name;
  };
  std::vector<Sub> subs;
  for (const char* name : {"spectrum", "evolve", "sweep", "verify"}) {
    CLI::App* cmd = app.add_subcommand(name);
    cmd->add_option("--config", config_path, "experiment config (JSON)")
        ->required();
    cmd->add_option("--out", out_path, "output file path");
    subs.push_back({cmd, name});
  }
  subs[0].cmd->description("eigenvalue branches and overlap matrix along the grid");
  subs[1].cmd->description("integrate one drive; Bloch components and fidelity per point");
  subs[2].cmd->description("final fidelity of every drive across a parameter sweep");
  subs[3].cmd->description("run the invariant audits; nonzero exit on failure");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    Config cfg = parse_config(config_path);
    cfg.self_check = cfg.self_check || self_check;
    const std::string out = !out_path.empty() ? out_path : cfg.out_path;

    for (const auto& sub : subs) {
      if (!sub.cmd->parsed()) continue;
      if (sub.name == "spectrum") cmd_spectrum(cfg, out);
      else if (sub.name == "evolve") cmd_evolve(cfg, out);
      else if (sub.name == "sweep") cmd_sweep(cfg, out);
      else if (sub.name == "verify") return cmd_verify(cfg, out);
    }
    return kExitOk;
  } catch (const ContractError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DimensionError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    // exceptional points, gauge ambiguity, integration failures
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace ltqd
