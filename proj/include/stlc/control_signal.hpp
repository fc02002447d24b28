#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

#include "stlc/quadrature.hpp"
#include "stlc/settings.hpp"

namespace stlc {

struct TimeGrid {
  double T = 1.0;
  int n_steps = 1;

  TimeGrid() = default;
  TimeGrid(double T_, int n);
  double dt() const { return T / n_steps; }
  double t(int i) const { return i == n_steps ? T : i * dt(); }
  int nodes() const { return n_steps + 1; }
  bool operator==(const TimeGrid& o) const { return T == o.T && n_steps == o.n_steps; }
};

/// Real control of regularity order K on a uniform grid.
///
/// The stored core w holds u^{(K)} at the nodes. The signal is u = B_K(w_h):
/// the K-fold primitive, vanishing at 0 together with its first K-1
/// derivatives, of the piecewise-linear interpolant w_h. On every cell u is
/// therefore a polynomial of degree K + 1, and derivatives, primitives,
/// moments and L^2 norms are all evaluated exactly on that spline.
class ControlSignal {
 public:
  ControlSignal() = default;
  ControlSignal(TimeGrid grid, int order, Eigen::VectorXd core);

  static ControlSignal zero(const TimeGrid& grid, int order);
  /// Order-0 signal with the given node samples.
  static ControlSignal from_samples(const TimeGrid& grid, Eigen::VectorXd samples);
  /// Signal of the given order whose core samples f at the nodes (f = u^{(order)}).
  static ControlSignal from_core_function(const TimeGrid& grid, int order, const std::function<double(double)>& f);

  const TimeGrid& grid() const { return grid_; }
  int order() const { return order_; }
  const Eigen::VectorXd& core() const { return core_; }

  /// u^{(r)}(t_i) for 0 <= r <= order, as a nodes x (order+1) table.
  const Eigen::MatrixXd& table() const { return *table_; }
  Eigen::VectorXd samples() const { return table_->col(0); }
  Eigen::VectorXd derivative_samples(int r) const;
  double value(double t) const;
  double terminal(int r) const { return (*table_)(grid_.n_steps, r); }

  /// u^{(r)} as a signal of order K - r.
  ControlSignal derivative(int r) const;
  /// u_n as a signal of order K + n.
  ControlSignal integrated(int n) const;
  /// Node samples of u_n; u_n(0) = 0.
  Eigen::VectorXd primitive(int n, const Settings& cfg = {}) const;
  /// u_n(T) for n >= 0.
  double primitive_at_end(int n) const;

  double l2_norm() const;
  double sup_norm() const;
  /// m >= 0: ||u^{(m)}||_{L^2}; m < 0: |u_1(T)| + ||u_{|m|}||_{L^2}.
  double sobolev_norm(int m, const Settings& cfg = {}) const;

  /// int_0^T u(t) e^{i omega t} dt. Throws PhaseResolutionExceeded when
  /// |omega| dt exceeds cfg.max_phase_per_step.
  cdouble moment(double omega, const Settings& cfg = {}) const;
  /// Same integral with no resolution check.
  cdouble moment_unchecked(double omega) const;
  /// int_0^T t^q u(t) dt.
  double poly_moment(int q) const;

  /// H^K_0 membership: |u^{(m)}(T)| <= bc_tol * ||u^{(m)}||_inf for m < K.
  bool in_h0k(const Settings& cfg = {}) const;

  ControlSignal& operator+=(const ControlSignal& o);
  ControlSignal& operator*=(double a);
  friend ControlSignal operator+(ControlSignal a, const ControlSignal& b) { return a += b; }
  friend ControlSignal operator-(ControlSignal a, const ControlSignal& b) { return a += (-1.0 * b); }
  friend ControlSignal operator*(double a, ControlSignal s) { return s *= a; }

 private:
  void build_table();
  /// Taylor coefficients a_q = u^{(q)}(t_i), q <= K, and a_{K+1} on cell i.
  void cell_coeffs(int i, double* a) const;

  TimeGrid grid_;
  int order_ = 0;
  Eigen::VectorXd core_;
  std::shared_ptr<const Eigen::MatrixXd> table_;
};

/// Smooth bump chi(t) = kappa exp(-1/(1-s^2)), s = (2t - T)/(T - 2 margin),
/// supported in (margin, T - margin) and normalized to int chi = T.
class BumpChi {
 public:
  BumpChi(const TimeGrid& grid, double margin);
  static BumpChi with_default_margin(const TimeGrid& grid) { return BumpChi(grid, grid.T / 8.0); }

  const TimeGrid& grid() const { return grid_; }
  double margin() const { return margin_; }
  double kappa() const { return kappa_; }
  double value(double t) const { return derivatives(t, 0)[0]; }
  /// chi^{(r)}(t) for r = 0..max_r.
  std::vector<double> derivatives(double t, int max_r) const;
  Eigen::VectorXd samples() const;
  /// nodes x (max_r+1) table of chi^{(r)}(t_i).
  Eigen::MatrixXd derivative_table(int max_r) const;

 private:
  TimeGrid grid_;
  double margin_;
  double half_width_;
  double kappa_;
};

/// int_{-1}^{1} exp(-1/(1-s^2)) ds.
double bump_integral();

}  // namespace stlc
