#pragma once

#include <cstdint>

namespace stlc {

/// Numerical tolerances and iteration caps shared by every module.
/// Defaults are the values the toolkit is validated with; the scenario
/// config file can override any of them.
struct Settings {
  // spectral_core
  double sphere_tol = 1e-9;
  double decay_floor = 1e-8;

  // control_signal
  double bc_tol = 1e-8;
  int max_primitive_order = 12;
  double max_phase_per_step = 1.0;

  // moment_solver
  double tol = 1e-8;
  double real_tol = 1e-10;
  double contraction_ceiling = 0.95;
  double contraction_target = 0.5;
  int probe_iters = 3;
  int max_neumann_iters = 200;
  int n_start = 12;
  double gram_cond_max = 1e12;
  std::uint64_t seed = 20240517;

  // schrodinger_sim
  double kick_phase_max = 0.5;

  // control_synthesis
  double synthesis_tol = 1e-10;
  int max_fixed_point_iters = 20;
  double delta = 1e-3;
  double radius = 1e-1;
  double damping = 1.0;
  double tangency_tol = 1e-12;
};

}  // namespace stlc
