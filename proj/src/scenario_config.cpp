#include "stlc/scenario_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "stlc/errors.hpp"
#include "stlc/io.hpp"

namespace stlc {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
  throw ConfigError("config field '" + field + "': " + msg);
}

const json& require(const json& j, const std::string& field) {
  if (!j.contains(field)) fail(field, "missing required field");
  return j.at(field);
}

double get_real(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(field, "must be finite");
  return v;
}

int get_int(const json& j, const std::string& field) {
  if (!j.is_number_integer()) fail(field, "expected an integer");
  return j.get<int>();
}

int parse_int_token(const std::string& tok, const std::string& field) {
  try {
    size_t pos = 0;
    const int v = std::stoi(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    fail(field, "'" + tok + "' is not an integer");
  }
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

void apply_tolerances(const json& t, Settings& s) {
  if (!t.is_object()) fail("tolerances", "expected a table of name = value");
  for (const auto& [key, val] : t.items()) {
    const std::string f = "tolerances." + key;
    auto real = [&](double& dst) {
      dst = get_real(val, f);
      if (!(dst > 0)) fail(f, "must be positive");
    };
    auto integer = [&](int& dst) {
      dst = get_int(val, f);
      if (dst <= 0) fail(f, "must be positive");
    };
    if (key == "sphere_tol") real(s.sphere_tol);
    else if (key == "decay_floor") real(s.decay_floor);
    else if (key == "bc_tol") real(s.bc_tol);
    else if (key == "max_primitive_order") integer(s.max_primitive_order);
    else if (key == "max_phase_per_step") real(s.max_phase_per_step);
    else if (key == "tol") real(s.tol);
    else if (key == "real_tol") real(s.real_tol);
    else if (key == "contraction_ceiling") real(s.contraction_ceiling);
    else if (key == "contraction_target") real(s.contraction_target);
    else if (key == "probe_iters") integer(s.probe_iters);
    else if (key == "max_neumann_iters") integer(s.max_neumann_iters);
    else if (key == "n_start") integer(s.n_start);
    else if (key == "gram_cond_max") real(s.gram_cond_max);
    else if (key == "kick_phase_max") real(s.kick_phase_max);
    else if (key == "synthesis_tol") real(s.synthesis_tol);
    else if (key == "max_fixed_point_iters") integer(s.max_fixed_point_iters);
    else if (key == "delta") real(s.delta);
    else if (key == "radius") real(s.radius);
    else if (key == "damping") real(s.damping);
    else if (key == "tangency_tol") real(s.tangency_tol);
    else fail(f, "unknown tolerance");
  }
  if (s.contraction_ceiling >= 1.0) fail("tolerances.contraction_ceiling", "must be below 1");
  if (s.damping > 1.0) fail("tolerances.damping", "must be in (0, 1]");
}

std::vector<double> real_list(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) fail(field, "expected a non-empty list of numbers");
  std::vector<double> out;
  for (size_t i = 0; i < j.size(); ++i) out.push_back(get_real(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

SweepSpec parse_sweep(const json& j) {
  if (!j.is_object()) fail("sweep", "expected a table");
  SweepSpec s;
  if (j.contains("ratio")) {
    const auto& r = j["ratio"];
    s.ratio = true;
    if (r.contains("n_samples")) s.n_samples = get_int(r["n_samples"], "sweep.ratio.n_samples");
    if (r.contains("delta")) s.delta = get_real(r["delta"], "sweep.ratio.delta");
    if (s.n_samples < 2) fail("sweep.ratio.n_samples", "must be at least 2");
    if (!(s.delta > 0)) fail("sweep.ratio.delta", "must be positive");
  }
  auto eps_block = [&](const char* name, bool& flag) {
    if (!j.contains(name)) return;
    flag = true;
    const std::string f = std::string("sweep.") + name + ".eps";
    const auto eps = real_list(require(j[name], "eps"), f);
    for (double e : eps) {
      if (!(e > 0)) fail(f, "entries must be positive");
    }
    if (!s.eps.empty() && s.eps != eps) fail(f, "remainder and linearization sweeps must share eps");
    s.eps = eps;
  };
  eps_block("remainder", s.remainder);
  eps_block("linearization", s.linearization);
  if (j.contains("contraction")) {
    const auto& c = j["contraction"];
    s.contraction = true;
    if (c.contains("N")) {
      s.N_values.clear();
      if (!c["N"].is_array() || c["N"].empty()) fail("sweep.contraction.N", "expected a non-empty integer list");
      for (const auto& v : c["N"]) s.N_values.push_back(get_int(v, "sweep.contraction.N"));
    }
    if (c.contains("ladder_size")) s.ladder_size = get_int(c["ladder_size"], "sweep.contraction.ladder_size");
    if (c.contains("n_steps")) s.contraction_steps = get_int(c["n_steps"], "sweep.contraction.n_steps");
    if (c.contains("samples")) s.contraction_samples = get_int(c["samples"], "sweep.contraction.samples");
    for (int N : s.N_values) {
      if (N < 1 || N >= s.ladder_size) fail("sweep.contraction.N", "entries must lie in [1, ladder_size)");
    }
    if (s.contraction_steps < 2) fail("sweep.contraction.n_steps", "must be at least 2");
    if (s.contraction_samples < 1) fail("sweep.contraction.samples", "must be positive");
  }
  return s;
}

}  // namespace

std::vector<int> parse_index_set(const json& spec) {
  std::vector<int> out;
  if (spec.is_array()) {
    for (const auto& v : spec) out.push_back(get_int(v, "J"));
  } else if (spec.is_string()) {
    std::stringstream ss(spec.get<std::string>());
    std::string part;
    while (std::getline(ss, part, ',')) {
      part = trim(part);
      if (part.empty()) continue;
      const auto dots = part.find("..");
      if (dots == std::string::npos) {
        out.push_back(parse_int_token(part, "J"));
        continue;
      }
      int step = 1;
      std::string hi = part.substr(dots + 2);
      const auto colon = hi.find(':');
      if (colon != std::string::npos) {
        step = parse_int_token(trim(hi.substr(colon + 1)), "J");
        hi = hi.substr(0, colon);
      }
      const int a = parse_int_token(trim(part.substr(0, dots)), "J");
      const int b = parse_int_token(trim(hi), "J");
      if (step <= 0) fail("J", "range step must be positive");
      if (b < a) fail("J", "empty range '" + part + "'");
      for (int i = a; i <= b; i += step) out.push_back(i);
    }
  } else {
    fail("J", "expected a range expression like \"1..12\" or an integer list");
  }
  if (out.empty()) fail("J", "index set is empty");
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) fail("J", "duplicate index");
  if (out.front() < 1) fail("J", "indices start at 1");
  return out;
}

ScenarioConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a table at the top level");
  ScenarioConfig c;
  c.raw = j;
  c.T = get_real(require(j, "T"), "T");
  if (j.contains("T0")) c.T0 = get_real(j["T0"], "T0");
  if (!(c.T0 >= 0)) fail("T0", "must be non-negative");
  if (!(c.T > c.T0)) fail("T", "must exceed T0");
  c.j_max = get_int(require(j, "j_max"), "j_max");
  if (c.j_max < 1) fail("j_max", "must be positive");
  c.n_steps = get_int(require(j, "n_steps"), "n_steps");
  if (c.n_steps < 2) fail("n_steps", "must be at least 2");
  if (j.contains("p")) c.p = get_int(j["p"], "p");
  if (j.contains("k")) c.k = get_int(j["k"], "k");
  if (c.p < 0) fail("p", "must be non-negative");
  if (c.k < 0) fail("k", "must be non-negative");
  c.J = parse_index_set(require(j, "J"));
  if (c.J.back() > c.j_max) fail("J", "max index " + std::to_string(c.J.back()) + " exceeds j_max");

  const auto& mu = require(j, "mu");
  if (mu.is_string()) {
    c.mu_name = mu.get<std::string>();
    if (c.mu_name != "x" && c.mu_name != "x2" && c.mu_name != "one") fail("mu", "unknown builtin '" + c.mu_name + "'");
  } else if (mu.is_array()) {
    c.mu_coeffs = real_list(mu, "mu");
  } else {
    fail("mu", "expected \"x\", \"x2\" or a list of polynomial coefficients");
  }

  if (j.contains("tolerances")) apply_tolerances(j["tolerances"], c.settings);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) fail("seed", "expected a non-negative integer");
    c.settings.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string()) fail("output_dir", "expected a path");
    c.output_dir = j["output_dir"].get<std::string>();
  }
  if (j.contains("control")) {
    const auto& u = j["control"];
    if (!u.is_object()) fail("control", "expected a table");
    if (u.contains("kind")) {
      if (!u["kind"].is_string()) fail("control.kind", "expected a string");
      c.control.kind = u["kind"].get<std::string>();
    }
    if (c.control.kind != "zero" && c.control.kind != "sine" && c.control.kind != "smooth" && c.control.kind != "file") {
      fail("control.kind", "expected zero, sine, smooth or file");
    }
    if (u.contains("amplitude")) c.control.amplitude = get_real(u["amplitude"], "control.amplitude");
    if (u.contains("frequency")) c.control.frequency = get_real(u["frequency"], "control.frequency");
    if (c.control.kind == "file") {
      const auto& pth = require(u, "path");
      if (!pth.is_string()) fail("control.path", "expected a path");
      c.control.path = pth.get<std::string>();
    }
  }
  if (j.contains("psi0")) c.psi0 = j["psi0"];
  if (j.contains("sweep")) {
    c.sweep_block_present = true;
    const auto& s = j["sweep"];
    if (s.is_object() && !s.empty()) c.sweep = parse_sweep(s);
  }
  return c;
}

MuSpec ScenarioConfig::mu() const {
  if (!mu_name.empty()) return MuSpec::builtin(mu_name);
  return MuSpec::polynomial(mu_coeffs);
}

Scenario ScenarioConfig::scenario() const {
  const ProjectionSet Jset(J, j_max);
  Scenario s = Scenario::make(j_max, mu(), T - T0, n_steps, Jset, p, k, settings);
  return s;
}

ControlSignal ScenarioConfig::control_signal(const TimeGrid& grid) const {
  const double a = control.amplitude;
  const double f = control.frequency;
  const double T0_ = T0;
  if (control.kind == "zero") return ControlSignal::zero(grid, 0);
  if (control.kind == "sine") {
    return ControlSignal::from_core_function(grid, 0, [=](double t) { return a * std::sin(2 * std::numbers::pi * f * (t + T0_)); });
  }
  if (control.kind == "smooth") {
    const BumpChi chi = BumpChi::with_default_margin(grid);
    const Eigen::VectorXd c = chi.samples();
    Eigen::VectorXd s(grid.nodes());
    for (int i = 0; i < grid.nodes(); ++i) s[i] = a * c[i] * std::cos(2 * std::numbers::pi * f * (grid.t(i) + T0_));
    return ControlSignal::from_samples(grid, s);
  }
  ControlSignal u = read_control_csv(control.path);
  if (u.grid().n_steps != grid.n_steps || std::abs(u.grid().T - grid.T) > 1e-12 * grid.T) {
    fail("control.path", "control file grid does not match T - T0 and n_steps");
  }
  return ControlSignal(grid, u.order(), u.core());
}

json load_config_file(const std::filesystem::path& path) {
  if (path.extension() == ".toml") {
    throw ConfigError(path.string() + ": TOML configs are read by the Python front end (python -m stlc); "
                      "the native binary accepts JSON");
  }
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config " + path.string());
  try {
    return json::parse(f, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace stlc
