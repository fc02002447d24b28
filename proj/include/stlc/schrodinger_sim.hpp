#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "stlc/control_signal.hpp"
#include "stlc/moment_solver.hpp"
#include "stlc/spectral_core.hpp"

namespace stlc {

struct Scenario {
  EigenBasis basis;
  DipoleOperator dipole;
  TimeGrid grid;
  ProjectionSet J;
  int p = 0;
  int k = 0;
  Settings cfg;
  /// p >= k, the regularity ordering of the controllability theorem. Recorded, not enforced.
  bool ordering_holds = true;

  Scenario(EigenBasis basis, DipoleOperator dipole, TimeGrid grid, ProjectionSet J, int p, int k, Settings cfg = {});
  static Scenario make(int j_max, const MuSpec& mu, double T, int n_steps, const ProjectionSet& J, int p, int k,
                       Settings cfg = {});

  int j_max() const { return basis.j_max(); }
  /// omega_j = lambda_{j+1} - lambda_1 for j = 0..j_max-1.
  FrequencyLadder ladder() const { return FrequencyLadder::schrodinger(basis.j_max()); }
  BumpChi chi() const { return BumpChi::with_default_margin(grid); }
  ModalState ground(double t) const;
};

using Trajectory = std::vector<ModalState>;

/// Strang splitting of i c' = Lambda c - u(t) M c with exact free flight. The
/// kick exp(i u_mid dt M) is applied through the eigendecomposition of M.
/// Returns c(t_i) for every node, or only the endpoint when `keep_all` is false.
Trajectory propagate_nonlinear(const Scenario& scn, const ControlSignal& u, const ModalState& psi0,
                               bool keep_all = true);
ModalState propagate_endpoint(const Scenario& scn, const ControlSignal& u, const ModalState& psi0);

/// Source term f(t) in modal coordinates, sampled at the grid nodes.
struct SourceTerm {
  std::vector<ModalState> samples;
};

/// G(t_i) = int_0^{t_i} e^{-i Lambda (t_i - tau)} f(tau) d tau, per mode by Filon.
Trajectory duhamel_integral(const Scenario& scn, const SourceTerm& f);

/// Psi(T) of the flow linearized around the ground state.
ModalState propagate_linearized(const Scenario& scn, const ControlSignal& u, const ModalState& Psi0);

struct EndpointValue {
  ModalState psi0;
  ModalState projected;
};
EndpointValue endpoint_map(const Scenario& scn, const ModalState& psi0, const ControlSignal& u);

/// psi(T; u, psi0) - psi_1(T) - Psi(T; u, psi0 - phi_1).
ModalState quadratic_remainder(const Scenario& scn, const ModalState& psi0, const ControlSignal& u);

/// Low-order fixed-point Duhamel iteration for cross-validation of the integrator.
ModalState duhamel_reference(const Scenario& scn, const ControlSignal& u, const ModalState& psi0, int iterations);

}  // namespace stlc
