#include "stlc/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>

#include "CLI11.hpp"
#include "stlc/control_synthesis.hpp"
#include "stlc/errors.hpp"
#include "stlc/io.hpp"
#include "stlc/quadrature.hpp"
#include "stlc/scenario_config.hpp"

namespace stlc {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kPi = std::numbers::pi;

struct Context {
  ScenarioConfig cfg;
  ArtifactMeta meta;
  fs::path out;
  CliOptions opts;
  std::ostream& log;
  std::ostream& err;
};

std::string hint_for(const std::string& kind) {
  if (kind == "DecayViolation") return "choose mu with b_j != 0 on J, or remove the offending indices from J";
  if (kind == "NoContraction") return "refine n_steps, enlarge j_max, or raise tolerances.n_start";
  if (kind == "NoConvergence") return "shrink the endpoint distance (delta) or raise tolerances.max_fixed_point_iters";
  if (kind == "PhaseResolutionExceeded" || kind == "GridTooCoarse") return "increase n_steps";
  if (kind == "SingularGram") return "lower k or j_max, or raise tolerances.gram_cond_max";
  if (kind == "SphereViolation") return "normalize the state to unit norm";
  if (kind == "TangencyViolation") return "remove the component along psi_1 from the tangent data";
  if (kind == "SupportViolation") return "the target must vanish outside J";
  if (kind == "ConfigError") return "see the field named above";
  if (kind == "OrderOutOfRange") return "lower k or raise tolerances.max_primitive_order";
  return {};
}

int code_for(const std::string& kind) {
  if (kind == "NoConvergence" || kind == "NoContraction") return kNoConvergence;
  if (kind == "SingularGram") return kVerifyFailed;
  return kInputError;
}

int report_error(const Error& e, std::ostream& err) {
  err << "error: " << e.what() << "\n";
  const std::string h = hint_for(e.kind());
  if (!h.empty()) err << "hint: " << h << "\n";
  return code_for(e.kind());
}

/// Named state at original time t ("ground" is psi_1(t)), or an explicit list.
ModalState resolve_state(const json& j, const Scenario& scn, double t, const std::string& field) {
  try {
    if (j.is_string() && j.get<std::string>() == "zero") return ModalState::zero(scn.j_max());
    if (j.is_string() && j.get<std::string>() == "ground") {
      return free_evolution(scn.basis, ModalState::unit(scn.j_max(), 1), t);
    }
    return state_from_json(j, scn.j_max());
  } catch (const InvalidArgument& e) {
    throw ConfigError(field + ": " + e.what());
  }
}

/// Smooth probe control of unit sup norm used when the config supplies none.
ControlSignal probe_control(const TimeGrid& g) {
  const double T = g.T;
  return ControlSignal::from_core_function(g, 0, [T](double t) {
    const double s = std::sin(kPi * t / T);
    return 0.5 * s * s * (1.0 + std::cos(29.6 * t / T));
  });
}

ControlSignal test_control(const Context& c, const TimeGrid& g) {
  if (c.cfg.control.kind == "zero") return probe_control(g);
  return c.cfg.control_signal(g);
}

Scenario with_steps(const Scenario& s, int n_steps) {
  return Scenario(s.basis, s.dipole, TimeGrid(s.grid.T, n_steps), s.J, s.p, s.k, s.cfg);
}

void write_json(const Context& c, const std::string& name, json body) {
  write_atomic(c.out / name, dump(with_meta(std::move(body), c.meta)));
}

json scenario_summary(const Context& c, const Scenario& scn) {
  return {{"T0", c.cfg.T0},
          {"T", c.cfg.T},
          {"j_max", scn.j_max()},
          {"n_steps", scn.grid.n_steps},
          {"p", scn.p},
          {"k", scn.k},
          {"J", c.cfg.J},
          {"ordering_holds", scn.ordering_holds}};
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(Context& c) {
  const Scenario scn = c.cfg.scenario();
  const ControlSignal u = c.cfg.control_signal(scn.grid);
  const ModalState psi0 = resolve_state(c.cfg.psi0, scn, c.cfg.T0, "psi0");
  const double n0 = hs_norm(psi0, 0.0);
  if (!(n0 > 0)) throw ConfigError("psi0: state is zero");

  const Trajectory traj = propagate_nonlinear(scn, u, psi0, true);
  double defect = 0.0;
  for (const auto& s : traj) defect = std::max(defect, std::abs(hs_norm(s, 0.0) - n0));
  const ModalState& end = traj.back();
  const ModalState free_end = free_evolution(scn.basis, psi0, scn.grid.T);

  const int stride = std::max(1, scn.grid.n_steps / 1000);
  write_atomic(c.out / "trajectory.csv", trajectory_csv(traj, scn.grid, c.meta, stride, c.cfg.T0));

  json rep;
  rep["scenario"] = scenario_summary(c, scn);
  rep["control"] = {{"kind", c.cfg.control.kind}, {"sup_norm", u.sup_norm()}, {"l2_norm", u.l2_norm()}};
  rep["initial_norm"] = n0;
  rep["max_norm_defect"] = defect;
  rep["conservation_tol"] = 1e-9;
  rep["conserved"] = defect <= 1e-9;
  rep["distance_to_free_flight"] = hs_norm(ModalState(end.coeffs - free_end.coeffs), 0.0);
  rep["endpoint"] = state_to_json(end);

  if (c.opts.dt_halve) {
    std::vector<ModalState> ends{end};
    std::vector<int> steps{scn.grid.n_steps};
    for (int l = 1; l <= 2; ++l) {
      const Scenario fine = with_steps(scn, scn.grid.n_steps << l);
      const ControlSignal uf = ControlSignal::from_core_function(fine.grid, 0, [&u](double t) { return u.value(t); });
      ends.push_back(propagate_endpoint(fine, uf, psi0));
      steps.push_back(fine.grid.n_steps);
    }
    std::string csv = csv_header_comment(c.meta) + "n_steps,dt,diff_to_next,ratio\n";
    json table = json::array();
    double prev = 0.0;
    for (size_t l = 0; l + 1 < ends.size(); ++l) {
      const double d = hs_norm(ModalState(ends[l].coeffs - ends[l + 1].coeffs), 0.0);
      const double ratio = (l > 0 && d > 0) ? prev / d : 0.0;
      char line[160];
      std::snprintf(line, sizeof line, "%d,%.17g,%.17g,%.17g\n", steps[l], scn.grid.T / steps[l], d, ratio);
      csv += line;
      table.push_back({{"n_steps", steps[l]}, {"diff_to_next", d}, {"ratio", ratio}});
      prev = d;
    }
    write_atomic(c.out / "self_convergence.csv", csv);
    rep["self_convergence"] = table;
  }
  write_json(c, "simulate.json", rep);
  c.log << "simulate: max norm defect " << defect << ", wrote " << (c.out / "trajectory.csv").string() << "\n";
  return defect <= 1e-9 ? kOk : kVerifyFailed;
}

// ------------------------------------------------------------ solve-moment

int cmd_solve_moment(Context& c) {
  if (c.opts.targets.empty()) throw ConfigError("solve-moment needs a targets CSV");
  const Scenario scn = c.cfg.scenario();
  const FrequencyLadder ladder = scn.ladder();
  const MomentVector d = read_moment_targets(c.opts.targets, ladder.size());
  d.check_real(scn.cfg);
  const SolveResult res = weak_estimate_solver(d, scn.k, ladder, scn.chi(), scn.cfg);

  write_atomic(c.out / "control.csv", control_csv(res.u, c.meta, c.cfg.T0));
  write_json(c, "control.json", control_sidecar(res.u, scn.cfg, c.meta));
  json rep = to_json(res.report);
  rep["relative_residual"] = res.report.max_residual / std::max(h2m_norm(d, ladder, 0), 1e-300);
  rep["scenario"] = scenario_summary(c, scn);
  write_json(c, "solver_report.json", rep);
  c.log << "solve-moment: max residual " << res.report.max_residual << " (" << res.report.method << ")\n";
  return kOk;
}

// ----------------------------------------------------------------- control

int cmd_control(Context& c) {
  if (c.opts.endpoints.empty()) throw ConfigError("control needs an endpoints file");
  if (c.opts.mode != "linear" && c.opts.mode != "nonlinear") throw ConfigError("--mode must be linear or nonlinear");
  const json ep = load_config_file(c.opts.endpoints);
  if (!ep.is_object() || !ep.contains("psi0") || !ep.contains("psif")) {
    throw ConfigError(c.opts.endpoints + ": expected fields psi0 and psif");
  }
  const Scenario scn = c.cfg.scenario();
  ControlTask task;
  task.delta = scn.cfg.delta;
  if (ep.contains("delta")) {
    if (!ep["delta"].is_number() || !(ep["delta"].get<double>() > 0)) throw ConfigError("delta: expected a positive number");
    task.delta = ep["delta"].get<double>();
  }

  json rep;
  SynthesisResult res;
  if (c.opts.mode == "linear") {
    task.psi0 = resolve_state(ep["psi0"], scn, c.cfg.T0, "psi0");
    task.psif = resolve_state(ep["psif"], scn, c.cfg.T, "psif");
    task = shift_to_origin(task, scn.basis, c.cfg.T0);
    res = linearized_control(scn, task.psi0, task.psif);
  } else {
    task.psi0 = resolve_state(ep["psi0"], scn, c.cfg.T0, "psi0");
    task.psif = ep["psif"].is_string() && ep["psif"].get<std::string>() == "ground"
                    ? project_J(free_evolution(scn.basis, ModalState::unit(scn.j_max(), 1), c.cfg.T), scn.J)
                    : resolve_state(ep["psif"], scn, c.cfg.T, "psif");
    task = shift_to_origin(task, scn.basis, c.cfg.T0);
    try {
      res = nonlinear_control(scn, task);
    } catch (const NoConvergence& e) {
      rep["converged"] = false;
      rep["history"] = e.history();
      rep["error"] = e.what();
      rep["scenario"] = scenario_summary(c, scn);
      write_json(c, "synthesis_report.json", rep);
      c.err << "history:";
      for (double h : e.history()) c.err << " " << h;
      c.err << "\n";
      throw;
    }
  }
  write_atomic(c.out / "control.csv", control_csv(res.u, c.meta, c.cfg.T0));
  write_json(c, "control.json", control_sidecar(res.u, scn.cfg, c.meta));
  rep = to_json(res.report);
  rep["mode"] = c.opts.mode;
  rep["scenario"] = scenario_summary(c, scn);
  write_json(c, "synthesis_report.json", rep);
  c.log << "control (" << c.opts.mode << "): final error " << res.report.final_error << " after "
        << res.report.iterations << " iterations\n";
  return kOk;
}

// ------------------------------------------------------------------ verify

struct Check {
  std::string name;
  std::string status;  // pass | fail | skipped
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

Check measured(std::string name, double value, double threshold, std::string detail = {}) {
  return {std::move(name), value <= threshold ? "pass" : "fail", value, threshold, std::move(detail)};
}

template <class F>
Check guarded(const std::string& name, double threshold, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    return {name, "fail", std::numeric_limits<double>::infinity(), threshold, e.what()};
  }
}

int cmd_verify(Context& c) {
  std::vector<Check> checks;
  const ScenarioConfig& cf = c.cfg;
  const Settings& cfg = cf.settings;
  const double T = cf.T - cf.T0;
  const EigenBasis basis(cf.j_max);
  const ProjectionSet J(cf.J, cf.j_max);

  checks.push_back(measured("orthonormality", basis.orthonormality_defect(), 1e-12));

  std::optional<Scenario> scn;
  try {
    DipoleOperator D = build_dipole(cf.mu(), basis, cf.p, J, cfg, cf.k);
    const double asym = (D.matrix - D.matrix.transpose()).norm() / std::max(D.matrix.norm(), 1e-300);
    checks.push_back(measured("dipole_symmetry", asym, 1e-14));
    double min_decay = std::numeric_limits<double>::infinity();
    for (int j : J.indices()) min_decay = std::min(min_decay, std::pow(j, 2 * cf.p + 3) * std::abs(D.b[j - 1]));
    checks.push_back({"decay", "pass", min_decay, cfg.decay_floor, "min over J of j^(2p+3) |b_j|"});
    scn.emplace(basis, std::move(D), TimeGrid(T, cf.n_steps), J, cf.p, cf.k, cfg);
  } catch (const DecayViolation& e) {
    checks.push_back({"dipole_symmetry", "skipped", 0.0, 1e-14, "no dipole"});
    checks.push_back({"decay", "fail", 0.0, cfg.decay_floor, e.what()});
  }

  const FrequencyLadder ladder = FrequencyLadder::schrodinger(cf.j_max);
  double gap_err = 0.0;
  for (int j = 0; j + 1 < ladder.size(); ++j) {
    gap_err = std::max(gap_err, std::abs(ladder.gap(j) - (2 * j + 3) * kPi * kPi) / ((2 * j + 3) * kPi * kPi));
  }
  checks.push_back(measured("gap_arithmetic", gap_err, 1e-13));

  const TimeGrid grid(T, cf.n_steps);
  const double max_phase = ladder[ladder.size() - 1] * grid.dt();
  checks.push_back(measured("phase_resolution", max_phase, cfg.max_phase_per_step, "omega_max * dt"));

  checks.push_back(guarded("filon_exactness", 1e-10, [&] {
    // int_0^T t e^{i w t} dt in closed form against the spline moment of u(t) = t.
    const ControlSignal lin = ControlSignal::from_core_function(grid, 0, [](double t) { return t; });
    double worst = 0.0;
    for (int j = 1; j < ladder.size(); j += std::max(1, ladder.size() / 8)) {
      const double w = ladder[j];
      const cdouble iw(0.0, w);
      const cdouble e = std::exp(iw * T);
      const cdouble exact = T * e / iw - (e - 1.0) / (iw * iw);
      worst = std::max(worst, std::abs(lin.moment(w, cfg) - exact) / std::abs(exact));
    }
    return measured("filon_exactness", worst, 1e-10, "relative, u(t) = t");
  }));

  const std::string why_skip = "dipole unavailable";
  auto need_scn = [&](const std::string& name, double thr, auto&& f) {
    if (!scn) {
      checks.push_back({name, "skipped", 0.0, thr, why_skip});
      return;
    }
    checks.push_back(guarded(name, thr, f));
  };

  need_scn("unitarity", 1e-9, [&] {
    const ControlSignal u = test_control(c, scn->grid);
    const ModalState psi0 = ModalState::unit(cf.j_max, 1);
    const Trajectory tr = propagate_nonlinear(*scn, u, psi0, true);
    double dev = 0.0;
    for (const auto& s : tr) dev = std::max(dev, std::abs(hs_norm(s, 0.0) - 1.0));
    return measured("unitarity", dev, 1e-9);
  });

  need_scn("free_flight", 1e-12, [&] {
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> n01;
    Eigen::VectorXcd v(cf.j_max);
    for (int j = 0; j < cf.j_max; ++j) v[j] = cdouble(n01(rng), n01(rng));
    v /= v.norm();
    const ModalState e = propagate_endpoint(*scn, ControlSignal::zero(scn->grid, 0), ModalState(v));
    double worst = 0.0;
    for (int j = 1; j <= cf.j_max; ++j) {
      worst = std::max(worst, std::abs(e.coeffs[j - 1] - v[j - 1] * std::polar(1.0, -basis.lambda(j) * T)));
    }
    return measured("free_flight", worst, 1e-12, "max per-mode deviation");
  });

  need_scn("self_convergence", 0.5, [&] {
    const ModalState psi0 = ModalState::unit(cf.j_max, 1);
    std::vector<ModalState> ends;
    for (int l = 0; l < 3; ++l) {
      const Scenario s = with_steps(*scn, cf.n_steps << l);
      ends.push_back(propagate_endpoint(s, test_control(c, s.grid), psi0));
    }
    const double d0 = hs_norm(ModalState(ends[0].coeffs - ends[1].coeffs), 0.0);
    const double d1 = hs_norm(ModalState(ends[1].coeffs - ends[2].coeffs), 0.0);
    // second order: d0 / d1 ~ 4; observed order within 0.5 of 2
    if (d0 < 1e-13) return Check{"self_convergence", "pass", 0.0, 0.5, "differences at round-off"};
    const double order = std::log2(d0 / std::max(d1, 1e-300));
    return measured("self_convergence", std::abs(order - 2.0), 0.5, "observed order " + std::to_string(order));
  });

  need_scn("tangency", 1e-12, [&] {
    const ControlSignal u = 1e-3 * probe_control(scn->grid);
    const EndpointValue ev = endpoint_map(*scn, ModalState::unit(cf.j_max, 1), u);
    const double r = std::abs(inner(ev.projected, scn->ground(T)).real());
    return measured("tangency", r, 1e-12, "|Re <Pi P_J psi(T), psi_1(T)>|");
  });

  std::optional<SolveResult> sol;
  MomentVector d;
  need_scn("moment_residual", 1e-6, [&] {
    const FrequencyLadder lad = scn->ladder();
    std::mt19937_64 rng(sample_seed(cfg.seed, 1));
    std::normal_distribution<double> n01;
    d = MomentVector::zero(lad.size());
    const int support = std::min(24, lad.size() - 1);
    d.d[0] = n01(rng);
    for (int j = 1; j <= support; ++j) d.d[j] = cdouble(n01(rng), n01(rng));
    sol = weak_estimate_solver(d, cf.k, lad, scn->chi(), cfg);
    const double rel = sol->report.max_residual / h2m_norm(d, lad, 0);
    return measured("moment_residual", rel, 1e-6, "relative to ||d||");
  });
  if (scn) {
    if (!sol) {
      checks.push_back({"weak_bc", "skipped", 0.0, 1e-8, "no moment solution"});
    } else {
      double worst = 0.0;
      const double l2 = std::max(sol->u.l2_norm(), 1e-300);
      for (size_t i = 0; i < sol->report.bc_values.size(); ++i) {
        const int q = static_cast<int>(i) + 2;
        worst = std::max(worst, std::abs(sol->report.bc_values[i]) / (l2 * std::pow(T, q - 1)));
      }
      checks.push_back(measured("weak_bc", worst, 1e-8, "max |u_q(T)| / (||u|| T^(q-1))"));
    }
  }

  need_scn("linear_control", 1e-6, [&] {
    const ControlTask task = random_task(*scn, 1e-2, sample_seed(cfg.seed, 2));
    const ModalState g0 = ModalState::unit(cf.j_max, 1);
    const ModalState gT = scn->ground(T);
    const ModalState p0 = project_tangent(ModalState(task.psi0.coeffs - g0.coeffs), g0, cfg);
    const ModalState pf = project_tangent(ModalState(task.psif.coeffs - project_J(gT, scn->J).coeffs), gT, cfg);
    const SynthesisResult r = linearized_control(*scn, p0, pf);
    const ModalState Psi = propagate_linearized(*scn, r.u, p0);
    const double e = hs_norm(ModalState(project_J(Psi, scn->J).coeffs - pf.coeffs), 0.0);
    return measured("linear_control", e, 1e-6, "||P_J Psi(T) - psi_f||");
  });

  json arr = json::array();
  bool all = true;
  for (const auto& ch : checks) {
    all = all && ch.status == "pass";
    json e = {{"name", ch.name}, {"status", ch.status}, {"threshold", ch.threshold}};
    e["value"] = std::isfinite(ch.value) ? json(ch.value) : json(nullptr);
    if (!ch.detail.empty()) e["detail"] = ch.detail;
    arr.push_back(e);
    c.log << (ch.status == "pass" ? "PASS " : ch.status == "fail" ? "FAIL " : "SKIP ") << ch.name;
    if (ch.status != "skipped") c.log << "  value=" << ch.value << " threshold=" << ch.threshold;
    if (!ch.detail.empty() && ch.status != "pass") c.log << "  (" << ch.detail << ")";
    c.log << "\n";
  }
  write_json(c, "verify.json", {{"checks", arr}, {"passed", all}});
  return all ? kOk : kVerifyFailed;
}

// ------------------------------------------------------------------- sweep

std::string fmt_g(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.17g", v);
  return b;
}

int cmd_sweep(Context& c) {
  if (!c.cfg.sweep) throw ConfigError("sweep: block missing or empty");
  const SweepSpec& sw = *c.cfg.sweep;
  const int threads = std::max(1, c.opts.threads);
  json summary;
  bool any_error = false;

  std::optional<Scenario> scn;
  auto scenario = [&]() -> const Scenario& {
    if (!scn) scn.emplace(c.cfg.scenario());
    return *scn;
  };

  if (sw.ratio) {
    const RatioSweep rs = estimate_ratio_sweep(scenario(), sw.n_samples, sw.delta, threads, c.cfg.settings.seed);
    std::string csv = csv_header_comment(c.meta) + "m,n_samples,max_ratio\n";
    for (const auto& cell : rs.cells) csv += std::to_string(cell.m) + "," + std::to_string(cell.n_samples) + "," + fmt_g(cell.max_ratio) + "\n";
    write_atomic(c.out / "ratio_sweep.csv", csv);
    json growth = json::object();
    for (const auto& [m, g] : rs.growth) growth[std::to_string(m)] = g;
    summary["ratio"] = {{"growth", growth}, {"failures", rs.failures}, {"n_samples", sw.n_samples}, {"delta", sw.delta}};
    any_error = any_error || rs.failures > 0;
  }

  auto scaling = [&](const char* name, const std::vector<ScalingPoint>& pts, double expected) {
    std::string csv = csv_header_comment(c.meta) + "eps,value,ok,error\n";
    for (const auto& p : pts) {
      csv += fmt_g(p.eps) + "," + fmt_g(p.value) + "," + (p.ok ? "1" : "0") + "," + p.error + "\n";
      any_error = any_error || !p.ok;
    }
    write_atomic(c.out / (std::string(name) + "_sweep.csv"), csv);
    const double slope = loglog_slope(pts);
    summary[name] = {{"slope", std::isfinite(slope) ? json(slope) : json(nullptr)}, {"expected_slope", expected}};
  };
  if (sw.remainder) {
    const Scenario& s = scenario();
    scaling("remainder", remainder_sweep(s, test_control(c, s.grid), sw.eps, threads), 2.0);
  }
  if (sw.linearization) {
    const Scenario& s = scenario();
    scaling("linearization", linearization_sweep(s, test_control(c, s.grid), sw.eps, threads), 1.0);
  }

  if (sw.contraction) {
    const TimeGrid g(c.cfg.T - c.cfg.T0, sw.contraction_steps);
    const BumpChi chi = BumpChi::with_default_margin(g);
    const FrequencyLadder lad = FrequencyLadder::schrodinger(sw.ladder_size);
    const auto pts = contraction_sweep(chi, lad, sw.N_values, c.cfg.settings, sw.contraction_samples, threads);
    std::string csv = csv_header_comment(c.meta) + "N,rho,ok,error\n";
    json first_ok = nullptr;
    bool monotone = true;
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& p : pts) {
      csv += std::to_string(p.N) + "," + fmt_g(p.rho) + "," + (p.ok ? "1" : "0") + "," + p.error + "\n";
      any_error = any_error || !p.ok;
      if (!p.ok) continue;
      if (first_ok.is_null() && p.rho <= c.cfg.settings.contraction_target) first_ok = p.N;
      if (p.rho > 1.5 * prev) monotone = false;
      prev = p.rho;
    }
    write_atomic(c.out / "contraction_sweep.csv", csv);
    summary["contraction"] = {{"first_N_below_target", first_ok}, {"monotone", monotone},
                              {"target", c.cfg.settings.contraction_target}};
  }
  write_json(c, "sweep_summary.json", summary);
  c.log << "sweep: wrote " << (c.out / "sweep_summary.json").string() << "\n";
  return any_error ? kVerifyFailed : kOk;
}

json hashed_view(json config) {
  config.erase("output_dir");
  return config;
}

}  // namespace

int run_command(const std::string& command, const json& config, const CliOptions& opts, std::ostream& out,
                std::ostream& err) {
  try {
    json effective = config;
    if (opts.seed && effective.is_object()) effective["seed"] = *opts.seed;
    Context c{parse_config(effective), {config_hash(hashed_view(effective)), kVersion}, {}, opts, out, err};
    c.out = opts.out_dir ? fs::path(*opts.out_dir) : fs::path(c.cfg.output_dir);
    if (!c.cfg.sweep_block_present && command == "sweep") throw ConfigError("sweep: block missing");
    if (c.cfg.p < c.cfg.k) err << "note: p < k; the regularity ordering is recorded as not holding\n";
    if (command == "simulate") return cmd_simulate(c);
    if (command == "solve-moment") return cmd_solve_moment(c);
    if (command == "control") return cmd_control(c);
    if (command == "verify") return cmd_verify(c);
    if (command == "sweep") return cmd_sweep(c);
    err << "error: unknown command '" << command << "'\n";
    return kInputError;
  } catch (const Error& e) {
    return report_error(e, err);
  } catch (const json::exception& e) {
    err << "error: ConfigError: " << e.what() << "\n";
    return kInputError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << "\n";
    return kVerifyFailed;
  }
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Projected small-time local controllability toolkit", "stlc"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  CliOptions opts;
  std::string out_dir;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "Scenario config (JSON)")->required();
  auto* out_opt = app.add_option("--out", out_dir, "Output directory (overrides output_dir)");
  auto* seed_opt = app.add_option("--seed", seed, "Random seed (overrides seed)");
  app.add_option("--threads", opts.threads, "Worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_flag("--dt-halve", opts.dt_halve, "simulate: also run at dt/2 and dt/4 and write a convergence table");
  app.add_flag_callback("--version", [] {
    std::cout << "stlc " << kVersion << "\n";
    throw CLI::Success();
  });

  app.add_subcommand("simulate", "Propagate the controlled state and write the trajectory");
  auto* sm = app.add_subcommand("solve-moment", "Solve a moment problem from a targets CSV");
  sm->add_option("targets", opts.targets, "CSV of (index, re, im)")->required()->check(CLI::ExistingFile);
  auto* ct = app.add_subcommand("control", "Synthesize a control between two endpoint states");
  ct->add_option("endpoints", opts.endpoints, "JSON with psi0, psif and optional delta")->required()->check(CLI::ExistingFile);
  ct->add_option("--mode", opts.mode, "linear or nonlinear")->check(CLI::IsMember({"linear", "nonlinear"}));
  app.add_subcommand("verify", "Run the invariant suite");
  app.add_subcommand("sweep", "Run the sweeps of the config's sweep block");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }
  if (out_opt->count() > 0) opts.out_dir = out_dir;
  if (seed_opt->count() > 0) opts.seed = seed;
  const std::string command = app.get_subcommands().front()->get_name();

  json config;
  try {
    config = load_config_file(config_path);
  } catch (const Error& e) {
    return report_error(e, std::cerr);
  }
  return run_command(command, config, opts, std::cout, std::cerr);
}

}  // namespace stlc
