#include "stlc/schrodinger_sim.hpp"

#include <cmath>
#include <string>

#include "stlc/errors.hpp"

namespace stlc {

Scenario::Scenario(EigenBasis basis_, DipoleOperator dipole_, TimeGrid grid_, ProjectionSet J_, int p_, int k_,
                   Settings cfg_)
    : basis(std::move(basis_)), dipole(std::move(dipole_)), grid(grid_), J(std::move(J_)), p(p_), k(k_), cfg(cfg_) {
  if (dipole.matrix.rows() != basis.j_max()) throw InvalidArgument("dipole built at a different truncation");
  if (J.max_index() > basis.j_max()) throw InvalidArgument("projection set exceeds the basis");
  if (p < 0 || k < 0) throw InvalidArgument("p and k must be nonnegative");
  ordering_holds = p >= k;
}

Scenario Scenario::make(int j_max, const MuSpec& mu, double T, int n_steps, const ProjectionSet& J, int p, int k,
                        Settings cfg) {
  EigenBasis basis(j_max);
  DipoleOperator D = build_dipole(mu, basis, p, J, cfg, k);
  return Scenario(std::move(basis), std::move(D), TimeGrid(T, n_steps), J, p, k, cfg);
}

ModalState Scenario::ground(double t) const { return free_evolution(basis, ModalState::unit(j_max(), 1), t); }

namespace {

struct Kick {
  Eigen::MatrixXd V;
  Eigen::VectorXd m;
};

Kick diagonalize(const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  return {es.eigenvectors(), es.eigenvalues()};
}

void phase_rotate(Eigen::VectorXcd& a, const Eigen::VectorXd& lambda, double t, double sign) {
  for (int j = 0; j < a.size(); ++j) a[j] *= std::polar(1.0, sign * lambda[j] * t);
}

}  // namespace

Trajectory propagate_nonlinear(const Scenario& scn, const ControlSignal& u, const ModalState& psi0, bool keep_all) {
  const TimeGrid& grid = u.grid();
  if (psi0.size() != scn.j_max()) throw InvalidArgument("initial state dimension mismatch");
  const double dt = grid.dt();
  const double phase = dt * u.sup_norm() * scn.dipole.norm2;
  if (phase > scn.cfg.kick_phase_max) {
    throw GridTooCoarse("dt*|u|_inf*|M|_2 = " + std::to_string(phase) + " > " + std::to_string(scn.cfg.kick_phase_max));
  }
  const Kick K = diagonalize(scn.dipole.matrix);
  const Eigen::VectorXd& lam = scn.basis.lambdas();

  // interaction picture: a = e^{i Lambda t} c
  Eigen::VectorXcd a = psi0.coeffs;
  Trajectory out;
  if (keep_all) {
    out.reserve(grid.nodes());
    out.push_back(psi0);
  }
  Eigen::VectorXcd y(a.size());
  for (int m = 0; m < grid.n_steps; ++m) {
    const double tm = (m + 0.5) * dt;
    const double ubar = u.value(tm);
    if (ubar != 0.0) {
      phase_rotate(a, lam, tm, -1.0);
      y.noalias() = K.V.transpose() * a;
      for (int q = 0; q < y.size(); ++q) y[q] *= std::polar(1.0, ubar * dt * K.m[q]);
      a.noalias() = K.V * y;
      phase_rotate(a, lam, tm, 1.0);
    }
    if (keep_all) {
      Eigen::VectorXcd c = a;
      phase_rotate(c, lam, grid.t(m + 1), -1.0);
      out.emplace_back(std::move(c));
    }
  }
  if (!keep_all) {
    phase_rotate(a, lam, grid.T, -1.0);
    out.emplace_back(std::move(a));
  }
  return out;
}

ModalState propagate_endpoint(const Scenario& scn, const ControlSignal& u, const ModalState& psi0) {
  return propagate_nonlinear(scn, u, psi0, false).back();
}

Trajectory duhamel_integral(const Scenario& scn, const SourceTerm& f) {
  const TimeGrid& grid = scn.grid;
  const int n = grid.n_steps;
  const int J = scn.j_max();
  if (static_cast<int>(f.samples.size()) != grid.nodes()) throw InvalidArgument("source term must be sampled on the grid");
  const double h = grid.dt();
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(grid.nodes(), J);
  for (int j = 1; j <= J; ++j) {
    const double lam = scn.basis.lambda(j);
    if (lam * h > scn.cfg.max_phase_per_step) {
      throw PhaseResolutionExceeded("duhamel_integral: lambda_" + std::to_string(j) + " dt too large");
    }
    const auto E = exp_poly_integrals(1, lam, h);
    const cdouble left = E[0] - E[1] / h;
    const cdouble right = E[1] / h;
    PhaseWalker ph(lam, h);
    cdouble sum(0.0, 0.0);
    for (int i = 0; i < n; ++i) {
      sum += ph.at(i) * (left * f.samples[i].coeffs[j - 1] + right * f.samples[i + 1].coeffs[j - 1]);
      acc(i + 1, j - 1) = sum;
    }
  }
  Trajectory out;
  out.reserve(grid.nodes());
  for (int i = 0; i <= n; ++i) {
    Eigen::VectorXcd c = acc.row(i).transpose();
    phase_rotate(c, scn.basis.lambdas(), grid.t(i), -1.0);
    out.emplace_back(std::move(c));
  }
  return out;
}

ModalState propagate_linearized(const Scenario& scn, const ControlSignal& u, const ModalState& Psi0) {
  const int J = scn.j_max();
  if (Psi0.size() != J) throw InvalidArgument("initial state dimension mismatch");
  const double T = u.grid().T;
  ModalState out = Psi0;
  for (int j = 1; j <= J; ++j) {
    const double om = scn.basis.lambda(j) - scn.basis.lambda(1);
    const cdouble mom = (j == 1) ? cdouble(u.primitive_at_end(1), 0.0) : u.moment(om, scn.cfg);
    out.coeffs[j - 1] = std::polar(1.0, -scn.basis.lambda(j) * T) *
                        (Psi0.coeffs[j - 1] + cdouble(0.0, 1.0) * scn.dipole.b[j - 1] * mom);
  }
  return out;
}

EndpointValue endpoint_map(const Scenario& scn, const ModalState& psi0, const ControlSignal& u) {
  const ModalState psiT = propagate_endpoint(scn, u, psi0);
  return {psi0, project_tangent(project_J(psiT, scn.J), scn.ground(u.grid().T), scn.cfg)};
}

ModalState quadratic_remainder(const Scenario& scn, const ModalState& psi0, const ControlSignal& u) {
  const double T = u.grid().T;
  const ModalState psiT = propagate_endpoint(scn, u, psi0);
  ModalState dpsi0 = psi0;
  dpsi0.coeffs[0] -= 1.0;
  const ModalState lin = propagate_linearized(scn, u, dpsi0);
  return ModalState(psiT.coeffs - scn.ground(T).coeffs - lin.coeffs);
}

ModalState duhamel_reference(const Scenario& scn, const ControlSignal& u, const ModalState& psi0, int iterations) {
  const TimeGrid& grid = u.grid();
  const int n = grid.n_steps;
  const Eigen::VectorXd& lam = scn.basis.lambdas();
  const Eigen::VectorXd us = u.samples();
  // a(t) = a0 + i int_0^t u e^{i Lambda tau} M e^{-i Lambda tau} a d tau, trapezoid in tau
  std::vector<Eigen::VectorXcd> a(n + 1, psi0.coeffs);
  for (int it = 0; it < iterations; ++it) {
    std::vector<Eigen::VectorXcd> next(n + 1);
    next[0] = psi0.coeffs;
    auto integrand = [&](int i) {
      Eigen::VectorXcd c = a[i];
      phase_rotate(c, lam, grid.t(i), -1.0);
      Eigen::VectorXcd v = scn.dipole.matrix * c;
      phase_rotate(v, lam, grid.t(i), 1.0);
      return Eigen::VectorXcd(cdouble(0.0, 1.0) * us[i] * v);
    };
    Eigen::VectorXcd prev = integrand(0);
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXcd cur = integrand(i + 1);
      next[i + 1] = next[i] + 0.5 * grid.dt() * (prev + cur);
      prev = std::move(cur);
    }
    a = std::move(next);
  }
  Eigen::VectorXcd c = a[n];
  phase_rotate(c, lam, grid.T, -1.0);
  return ModalState(c);
}

}  // namespace stlc
