#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stlc/control_signal.hpp"
#include "stlc/settings.hpp"

namespace stlc {

/// Increasing frequencies omega_0 = 0 < omega_1 < ... with polynomial gap
/// metadata omega_{j+1} - omega_j >= c j^eps for j >= N0.
struct FrequencyLadder {
  Eigen::VectorXd omega;
  double gap_c = 0.0;
  double gap_eps = 0.0;
  int gap_N0 = 0;

  /// omega_j = lambda_{j+1} - lambda_1 = ((j+1)^2 - 1) pi^2, j = 0..size-1.
  static FrequencyLadder schrodinger(int size);
  /// Arbitrary ladder; gap metadata fitted with eps = 1 when possible, else 0.
  static FrequencyLadder custom(Eigen::VectorXd omega);

  int size() const { return static_cast<int>(omega.size()); }
  double operator[](int j) const { return omega[j]; }
  double gap(int j) const { return omega[j + 1] - omega[j]; }
};

struct MomentVector {
  Eigen::VectorXcd d;     // d_j, j = 0..size-1, d_0 real
  Eigen::VectorXd poly;   // d_{-q}, q = 1..poly.size()

  static MomentVector zero(int size, int npoly = 0) {
    return {Eigen::VectorXcd::Zero(size), Eigen::VectorXd::Zero(npoly)};
  }
  int size() const { return static_cast<int>(d.size()); }
  /// Throws InvalidArgument when Im d_0 exceeds real_tol |d_0|.
  void check_real(const Settings& cfg) const;
};

/// (sum_j |(delta_{j0} + omega_j^m) d_j|^2)^{1/2}; the j = 0 weight is 1 for every m.
double h2m_norm(const MomentVector& d, const FrequencyLadder& ladder, int m);

struct SolverReport {
  std::string method;
  std::vector<double> residuals;       // |moment - target| per enforced constraint
  double max_residual = 0.0;
  double target_scale = 0.0;           // max(1, ||d||)
  std::map<int, double> norms;         // m -> ||u||_{H^m_0}
  std::vector<double> bc_values;       // u_2(T), ..., u_{k+1}(T)
  int iterations = 0;
  double rho = 0.0;
  int N = 0;
  std::vector<double> residual_history;
  bool converged = true;
};

/// Moments int u e^{i omega_j t} for N <= j < size; lower entries are zero.
MomentVector op_LN(const ControlSignal& u, int N, const FrequencyLadder& ladder, const Settings& cfg = {});

/// Sum over |j| >= N of d_j xi_j with xi_j = (1/T) e^{-i omega_j t} chi(t),
/// d_{-j} = conj(d_j). Returned as a signal of the given order whose core is
/// the order-th derivative of that sum.
ControlSignal op_PN(const MomentVector& d, int N, const BumpChi& chi, const FrequencyLadder& ladder, int order = 0);

/// P_N and L_N on a fixed grid, with P_N calibrated so that the discrete
/// diagonal moment identity L_j P_N(e_j) = 1 holds exactly.
class NeumannOperator {
 public:
  NeumannOperator(int N, const BumpChi& chi, const FrequencyLadder& ladder, int order, const Settings& cfg);
  ControlSignal P(const MomentVector& d) const;
  MomentVector L(const ControlSignal& u) const;
  int N() const { return N_; }

 private:
  int N_;
  BumpChi chi_;
  FrequencyLadder ladder_;
  int order_;
  Settings cfg_;
  Eigen::MatrixXd chi_table_;
  // Real 2x2 inverse of c -> L_j P_N(c e_j), per j >= N.
  std::vector<Eigen::Matrix2d> inverse_;
  ControlSignal build(const Eigen::VectorXcd& c) const;
};

struct SolveResult {
  ControlSignal u;
  SolverReport report;
};

SolveResult neumann_inverse(const MomentVector& d, int N, const BumpChi& chi, const FrequencyLadder& ladder,
                            double tol, const Settings& cfg = {}, int order = 0);

/// Sup of successive residual ratios over cfg.probe_iters Neumann steps on a
/// seeded random unit target supported on j >= N.
double measure_contraction(int N, const BumpChi& chi, const FrequencyLadder& ladder, const Settings& cfg,
                           int order = 0, std::uint64_t seed = 0);

/// Cutoff search: N = cfg.n_start, doubled until rho <= cfg.contraction_target.
/// Returns (N, rho). N >= ladder.size() means no high-frequency part.
std::pair<int, double> select_cutoff(const BumpChi& chi, const FrequencyLadder& ladder, const Settings& cfg,
                                     int order = 0);

/// Minimum ||u^{(k)}||_{L^2} control of order k with moments d_j for j < N,
/// zero moments for N <= j <= zero_upto, polynomial moments d.poly and
/// terminal values u^{(m)}(T) = bc_targets[m] (zero when omitted) for m < k.
ControlSignal low_freq_solver(const MomentVector& d, int N, int zero_upto, int k, const FrequencyLadder& ladder,
                              const TimeGrid& grid, const Settings& cfg = {},
                              const std::vector<double>& bc_targets = {});

SolveResult combined_solver(const MomentVector& d, int k, const FrequencyLadder& ladder, const BumpChi& chi,
                            const Settings& cfg = {});

SolveResult weak_estimate_solver(const MomentVector& d, int k, const FrequencyLadder& ladder, const BumpChi& chi,
                                 const Settings& cfg = {});

/// Residuals, norms and boundary values of u against targets d.
SolverReport evaluate_solution(const ControlSignal& u, const MomentVector& d, const FrequencyLadder& ladder,
                               int k, int min_m, const Settings& cfg = {});

}  // namespace stlc
