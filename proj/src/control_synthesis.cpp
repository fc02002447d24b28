#include "stlc/control_synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <string>

#include "stlc/errors.hpp"
#include "stlc/parallel.hpp"

namespace stlc {

namespace {

int data_index(const Scenario& scn, int m) { return 2 * (scn.p + m) + 3; }

void fill_norms(const Scenario& scn, const ControlSignal& u, SynthesisReport& rep,
                const std::function<double(int)>& data) {
  for (int m = -(scn.k + 1); m <= scn.k; ++m) {
    rep.control_norms[m] = u.sobolev_norm(m, scn.cfg);
    rep.data_norms[m] = data(m);
    rep.ratios[m] = rep.data_norms[m] > 0.0 ? rep.control_norms[m] / rep.data_norms[m] : 0.0;
  }
  rep.bc_values.clear();
  for (int q = 2; q <= scn.k + 1; ++q) rep.bc_values.push_back(u.primitive_at_end(q));
}

}  // namespace

std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

double data_norm(const Scenario& scn, const ModalState& psi0, const ModalState& psif, int m) {
  const double s = data_index(scn, m);
  ModalState d0 = psi0;
  d0.coeffs[0] -= 1.0;
  const ModalState ref = project_J(scn.ground(scn.grid.T), scn.J);
  return hs_norm(d0, s) + hs_norm(ModalState(psif.coeffs - ref.coeffs), s);
}

SynthesisResult linearized_control(const Scenario& scn, const ModalState& psi0_t, const ModalState& psif_t) {
  const int J = scn.j_max();
  const double T = scn.grid.T;
  const Settings& cfg = scn.cfg;
  if (psi0_t.size() != J || psif_t.size() != J) throw InvalidArgument("state dimension mismatch");
  const double re0 = psi0_t.coeffs[0].real();
  if (std::abs(re0) > cfg.tangency_tol * std::max(1.0, hs_norm(psi0_t, 0.0))) {
    throw TangencyViolation("Re<psi0, phi_1> = " + std::to_string(re0));
  }
  const ModalState g = scn.ground(T);
  const double ref = inner(psif_t, g).real();
  if (std::abs(ref) > cfg.tangency_tol * std::max(1.0, hs_norm(psif_t, 0.0))) {
    throw TangencyViolation("Re<psif, psi_1(T)> = " + std::to_string(ref));
  }
  const ModalState off(psif_t.coeffs - project_J(psif_t, scn.J).coeffs);
  if (hs_norm(off, 0.0) > 1e-14 * std::max(1.0, hs_norm(psif_t, 0.0))) {
    throw SupportViolation("target has components outside J");
  }

  const FrequencyLadder ladder = scn.ladder();
  MomentVector d = MomentVector::zero(J);
  for (int j : scn.J.indices()) {
    const cdouble num = psif_t.coeffs[j - 1] * std::polar(1.0, scn.basis.lambda(j) * T) - psi0_t.coeffs[j - 1];
    d.d[j - 1] = num / (cdouble(0.0, 1.0) * scn.dipole.b[j - 1]);
  }
  // tangency makes d_0 real; drop the rounding residue
  d.d[0] = d.d[0].real();

  const BumpChi chi = scn.chi();
  SolveResult sol = weak_estimate_solver(d, scn.k, ladder, chi, cfg);
  SynthesisResult res{sol.u, {}};
  res.report.moment_report = sol.report;
  fill_norms(scn, sol.u, res.report, [&](int m) {
    const double s = data_index(scn, m);
    return hs_norm(psi0_t, s) + hs_norm(psif_t, s);
  });
  const ModalState Psi = propagate_linearized(scn, sol.u, psi0_t);
  res.report.final_error = hs_norm(ModalState(project_J(Psi, scn.J).coeffs - psif_t.coeffs), 0.0);
  res.report.history = {res.report.final_error};
  return res;
}

SynthesisResult nonlinear_control(const Scenario& scn, const ControlTask& task) {
  const Settings& cfg = scn.cfg;
  const double T = scn.grid.T;
  const int J = scn.j_max();
  if (task.psi0.size() != J || task.psif.size() != J) throw InvalidArgument("state dimension mismatch");
  const double n0 = hs_norm(task.psi0, 0.0);
  if (std::abs(n0 - 1.0) > cfg.sphere_tol) throw SphereViolation("|psi0| = " + std::to_string(n0));
  const ModalState off(task.psif.coeffs - project_J(task.psif, scn.J).coeffs);
  if (hs_norm(off, 0.0) > 1e-14 * std::max(1.0, hs_norm(task.psif, 0.0))) {
    throw SupportViolation("target has components outside J");
  }
  const double s_top = data_index(scn, scn.k);
  ModalState d0 = task.psi0;
  d0.coeffs[0] -= 1.0;
  const ModalState gT = scn.ground(T);
  const ModalState refT = project_J(gT, scn.J);
  if (!(hs_norm(d0, s_top) < task.delta)) throw InvalidArgument("psi0 outside the delta-neighbourhood of phi_1");
  if (!(hs_norm(ModalState(task.psif.coeffs - refT.coeffs), s_top) < task.delta)) {
    throw InvalidArgument("psif outside the delta-neighbourhood of P_J psi_1(T)");
  }

  const ModalState target = project_tangent(task.psif, gT, cfg);
  const double s_err = 2 * scn.p + 3;
  ControlSignal u = ControlSignal::zero(scn.grid, scn.k);
  SynthesisResult res{u, {}};
  std::vector<double>& hist = res.report.history;
  SolverReport last_moment;
  double rho = 0.0;
  int it = 0;
  while (true) {
    const ModalState psiT = propagate_endpoint(scn, u, task.psi0);
    const ModalState PJ = project_J(psiT, scn.J);
    const double err = hs_norm(ModalState(PJ.coeffs - task.psif.coeffs), s_err);
    if (!hist.empty() && hist.back() > 1e3 * std::numeric_limits<double>::epsilon()) rho = std::max(rho, err / hist.back());
    hist.push_back(err);
    res.report.mode1_real = inner(psiT, gT).real();
    if (err <= cfg.synthesis_tol) break;
    if (it == cfg.max_fixed_point_iters) {
      throw NoConvergence("error " + std::to_string(err) + " after " + std::to_string(it) +
                              " iterations; try halving delta",
                          hist);
    }
    const ModalState defect(project_tangent(PJ, gT, cfg).coeffs - target.coeffs);
    const SynthesisResult inc = linearized_control(scn, ModalState::zero(J), defect);
    last_moment = inc.report.moment_report;
    u += (-cfg.damping) * inc.u;
    ++it;
  }
  res.u = u;
  res.report.iterations = it;
  res.report.rho = rho;
  res.report.final_error = hist.back();
  res.report.converged = true;
  res.report.moment_report = last_moment;
  fill_norms(scn, u, res.report, [&](int m) { return data_norm(scn, task.psi0, task.psif, m); });
  return res;
}

ControlTask random_task(const Scenario& scn, double delta, std::uint64_t seed) {
  const int J = scn.j_max();
  const double T = scn.grid.T;
  const double s = data_index(scn, scn.k);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  auto random_dir = [&](bool onJ) {
    Eigen::VectorXcd v(J);
    for (int j = 1; j <= J; ++j) {
      v[j - 1] = (onJ && !scn.J.contains(j)) ? cdouble(0.0, 0.0) : cdouble(g(rng), g(rng));
    }
    return ModalState(v);
  };
  // Scale a perturbation of base so that the H^s distance is target (normalizing when asked).
  auto place = [&](const ModalState& base, const ModalState& dir, bool normalize) {
    const double goal = 0.5 * delta;
    double scale = goal / hs_norm(dir, s);
    ModalState out;
    for (int pass = 0; pass < 4; ++pass) {
      out = ModalState(base.coeffs + scale * dir.coeffs);
      if (normalize) out.coeffs /= out.coeffs.norm();
      const double dist = hs_norm(ModalState(out.coeffs - base.coeffs), s);
      if (dist == 0.0) break;
      scale *= goal / dist;
    }
    return out;
  };
  ControlTask task;
  task.delta = delta;
  task.psi0 = place(ModalState::unit(J, 1), random_dir(false), true);
  const ModalState refT = project_J(scn.ground(T), scn.J);
  task.psif = place(refT, random_dir(true), scn.J.contains(1));
  return task;
}

ControlTask shift_to_origin(const ControlTask& task, const EigenBasis& basis, double T0) {
  ControlTask out = task;
  const cdouble ph = std::polar(1.0, basis.lambda(1) * T0);
  out.psi0.coeffs *= ph;
  out.psif.coeffs *= ph;
  return out;
}

RatioSweep estimate_ratio_sweep(const Scenario& scn, int n_samples, double delta, int threads, std::uint64_t seed) {
  if (n_samples < 2) throw InvalidArgument("estimate_ratio_sweep needs at least two samples");
  if (seed == 0) seed = scn.cfg.seed;
  const int lo = -(scn.k + 1), hi = scn.k;
  std::vector<std::map<int, double>> ratios(n_samples);
  std::vector<char> ok(n_samples, 0);
  parallel_for(n_samples, threads, [&](int i) {
    try {
      const ControlTask task = random_task(scn, delta, sample_seed(seed, i));
      const SynthesisResult r = nonlinear_control(scn, task);
      bool any = false;
      for (int m = lo; m <= hi; ++m) any = any || r.report.data_norms.at(m) > 0.0;
      if (any) {
        ratios[i] = r.report.ratios;
        ok[i] = 1;
      }
    } catch (const Error&) {
      ok[i] = 2;
    }
  });

  RatioSweep out;
  out.failures = static_cast<int>(std::count(ok.begin(), ok.end(), 2));
  const int half = n_samples / 2;
  bool any = false;
  for (int m = lo; m <= hi; ++m) {
    double mh = 0.0, ma = 0.0;
    for (int i = 0; i < n_samples; ++i) {
      if (ok[i] != 1) continue;
      any = true;
      if (i < half) mh = std::max(mh, ratios[i].at(m));
      ma = std::max(ma, ratios[i].at(m));
    }
    out.cells.push_back({m, half, mh});
    out.cells.push_back({m, n_samples, ma});
    out.growth[m] = mh > 0.0 ? ma / mh : 0.0;
  }
  out.empty = !any;
  if (out.empty) {
    out.cells.clear();
    out.growth.clear();
  }
  return out;
}

std::vector<ScalingPoint> remainder_sweep(const Scenario& scn, const ControlSignal& u, const std::vector<double>& eps,
                                         int threads) {
  std::vector<ScalingPoint> pts(eps.size());
  const ModalState psi0 = ModalState::unit(scn.j_max(), 1);
  parallel_for(static_cast<int>(eps.size()), threads, [&](int i) {
    pts[i].eps = eps[i];
    try {
      pts[i].value = hs_norm(quadratic_remainder(scn, psi0, eps[i] * u), 0.0);
      pts[i].ok = true;
    } catch (const Error& e) {
      pts[i].error = e.what();
    }
  });
  return pts;
}

std::vector<ScalingPoint> linearization_sweep(const Scenario& scn, const ControlSignal& u,
                                             const std::vector<double>& eps, int threads) {
  std::vector<ScalingPoint> pts(eps.size());
  const int J = scn.j_max();
  const ModalState psi0 = ModalState::unit(J, 1);
  const double T = u.grid().T;
  parallel_for(static_cast<int>(eps.size()), threads, [&](int i) {
    pts[i].eps = eps[i];
    try {
      const ModalState Psi = propagate_linearized(scn, u, ModalState::zero(J));
      const ModalState psi = propagate_endpoint(scn, eps[i] * u, psi0);
      const Eigen::VectorXcd diff = (psi.coeffs - scn.ground(T).coeffs) / eps[i] - Psi.coeffs;
      pts[i].value = diff.norm();
      pts[i].ok = true;
    } catch (const Error& e) {
      pts[i].error = e.what();
    }
  });
  return pts;
}

std::vector<ContractionPoint> contraction_sweep(const BumpChi& chi, const FrequencyLadder& ladder,
                                               const std::vector<int>& Ns, const Settings& cfg, int samples,
                                               int threads) {
  std::vector<ContractionPoint> pts(Ns.size());
  parallel_for(static_cast<int>(Ns.size()), threads, [&](int i) {
    pts[i].N = Ns[i];
    try {
      double rho = 0.0;
      for (int s = 0; s < samples; ++s) {
        rho = std::max(rho, measure_contraction(Ns[i], chi, ladder, cfg, 0, sample_seed(cfg.seed, s)));
      }
      pts[i].rho = rho;
      pts[i].ok = true;
    } catch (const Error& e) {
      pts[i].error = e.what();
    }
  });
  return pts;
}

double loglog_slope(const std::vector<ScalingPoint>& pts) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& p : pts) {
    if (!p.ok || !(p.value > 0.0)) continue;
    const double x = std::log(p.eps), y = std::log(p.value);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace stlc
