#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "stlc/moment_solver.hpp"
#include "stlc/schrodinger_sim.hpp"

namespace stlc {

struct ControlTask {
  ModalState psi0;
  ModalState psif;
  double delta = 1e-3;
};

struct SynthesisReport {
  std::map<int, double> control_norms;  // m -> ||u||_{H^m_0}
  std::map<int, double> data_norms;     // m -> data size in H^{2(p+m)+3}
  std::map<int, double> ratios;         // control_norms / data_norms
  std::vector<double> bc_values;        // u_2(T), ..., u_{k+1}(T)
  std::vector<double> history;          // projection error per iterate
  double rho = 0.0;
  int iterations = 0;
  double final_error = 0.0;
  double mode1_real = 0.0;              // Re <psi(T), psi_1(T)>
  bool converged = true;
  SolverReport moment_report;
};

struct SynthesisResult {
  ControlSignal u;
  SynthesisReport report;
};

/// Right inverse of the linearized end-point map: the control u with
/// P_J Psi(T; u, psi0_tangent) = psif_tangent.
SynthesisResult linearized_control(const Scenario& scn, const ModalState& psi0_tangent,
                                   const ModalState& psif_tangent);

/// Fixed-point synthesis u^{n+1} = u^n - theta * linearized_control(0, defect(u^n)).
/// Throws NoConvergence with the error history when the cap is reached.
SynthesisResult nonlinear_control(const Scenario& scn, const ControlTask& task);

/// Random admissible task at distance delta/2 from the ground-state pair.
/// The target is on the sphere when 1 is in J.
ControlTask random_task(const Scenario& scn, double delta, std::uint64_t seed);

/// Re-express a task posed on [T0, T] as one posed on [0, T - T0] by the
/// global phase e^{i lambda_1 T0}.
ControlTask shift_to_origin(const ControlTask& task, const EigenBasis& basis, double T0);

struct RatioCell {
  int m = 0;
  int n_samples = 0;
  double max_ratio = 0.0;
};

struct RatioSweep {
  std::vector<RatioCell> cells;           // one row per (m, sample-size)
  std::map<int, double> growth;           // m -> max(all) / max(first half)
  int failures = 0;
  bool empty = false;
};

/// Synthesizes n_samples random tasks at the given radius on up to `threads`
/// workers; sample i uses seed (seed, i) so results do not depend on threads.
RatioSweep estimate_ratio_sweep(const Scenario& scn, int n_samples, double delta, int threads = 1,
                                std::uint64_t seed = 0);

/// Data norm ||psi0 - phi_1||_{H^s} + ||psif - P_J psi_1(T)||_{H^s} with s = 2(p+m)+3.
double data_norm(const Scenario& scn, const ModalState& psi0, const ModalState& psif, int m);

struct ScalingPoint {
  double eps = 0.0;
  double value = 0.0;
  bool ok = false;
  std::string error;
};

/// ||quadratic_remainder(phi_1, eps u)|| for each eps.
std::vector<ScalingPoint> remainder_sweep(const Scenario& scn, const ControlSignal& u, const std::vector<double>& eps,
                                         int threads = 1);
/// ||(psi(T; eps u, phi_1) - psi_1(T)) / eps - Psi(T; u, 0)|| for each eps.
std::vector<ScalingPoint> linearization_sweep(const Scenario& scn, const ControlSignal& u,
                                             const std::vector<double>& eps, int threads = 1);
/// Least-squares slope of log(value) against log(eps) over the successful points.
double loglog_slope(const std::vector<ScalingPoint>& pts);

struct ContractionPoint {
  int N = 0;
  double rho = 0.0;
  bool ok = false;
  std::string error;
};

/// Largest measured Neumann contraction over `samples` seeded random targets, per N.
std::vector<ContractionPoint> contraction_sweep(const BumpChi& chi, const FrequencyLadder& ladder,
                                               const std::vector<int>& Ns, const Settings& cfg, int samples = 3,
                                               int threads = 1);

/// Deterministic per-sample seed.
std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace stlc
