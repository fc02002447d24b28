#include "stlc/moment_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "stlc/errors.hpp"

namespace stlc {

namespace {

constexpr double kPi = std::numbers::pi;

double binomial(int n, int r) {
  double b = 1.0;
  for (int i = 1; i <= r; ++i) b = b * (n - r + i) / i;
  return b;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Nonzero row range of a chi table.
std::pair<int, int> support_rows(const Eigen::MatrixXd& tab) {
  int lo = 0, hi = static_cast<int>(tab.rows()) - 1;
  while (lo <= hi && tab.row(lo).isZero(0.0)) ++lo;
  while (hi >= lo && tab.row(hi).isZero(0.0)) --hi;
  return {lo, hi};
}

// core_i += weight * Re(c * sum_r C(K,r) chi^{(r)}(t_i) (-i omega)^{K-r} e^{-i omega t_i})
void accumulate_mode(Eigen::VectorXd& core, const Eigen::MatrixXd& chi_tab, int K, double omega, cdouble c,
                     double weight, const TimeGrid& grid) {
  if (c == cdouble(0.0, 0.0)) return;
  std::vector<cdouble> pw(K + 1);
  for (int r = 0; r <= K; ++r) pw[r] = c * weight * binomial(K, r) * std::pow(cdouble(0.0, -omega), K - r);
  const auto [lo, hi] = support_rows(chi_tab);
  PhaseWalker phase(-omega, grid.dt());
  for (int i = lo; i <= hi; ++i) {
    cdouble s(0.0, 0.0);
    for (int r = 0; r <= K; ++r) s += pw[r] * chi_tab(i, r);
    core[i] += (phase.at(i) * s).real();
  }
}

double h0_norm_from(const Eigen::VectorXcd& d, int N) { return d.tail(d.size() - N).norm(); }

Eigen::VectorXcd random_unit(int size, int N, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXcd d = Eigen::VectorXcd::Zero(size);
  for (int j = N; j < size; ++j) d[j] = cdouble(g(rng), g(rng));
  const double n = d.norm();
  if (n > 0.0) d /= n;
  return d;
}

}  // namespace

FrequencyLadder FrequencyLadder::schrodinger(int size) {
  if (size < 1) throw InvalidArgument("ladder size must be positive");
  FrequencyLadder L;
  L.omega.resize(size);
  for (int j = 0; j < size; ++j) L.omega[j] = static_cast<double>((j + 1) * (j + 1) - 1) * kPi * kPi;
  L.gap_c = 2.0 * kPi * kPi;
  L.gap_eps = 1.0;
  L.gap_N0 = 1;
  return L;
}

FrequencyLadder FrequencyLadder::custom(Eigen::VectorXd omega) {
  FrequencyLadder L;
  L.omega = std::move(omega);
  if (L.size() < 1 || L.omega[0] != 0.0) throw InvalidArgument("ladder must start at omega_0 = 0");
  for (int j = 0; j + 1 < L.size(); ++j) {
    if (!(L.omega[j + 1] > L.omega[j])) throw InvalidArgument("ladder must be strictly increasing");
  }
  double c1 = std::numeric_limits<double>::infinity();
  double c0 = c1;
  for (int j = 1; j + 1 < L.size(); ++j) {
    c1 = std::min(c1, L.gap(j) / j);
    c0 = std::min(c0, L.gap(j));
  }
  if (L.size() >= 3 && c1 > 0.0) {
    L.gap_c = c1;
    L.gap_eps = 1.0;
  } else {
    L.gap_c = L.size() >= 3 ? c0 : 0.0;
    L.gap_eps = 0.0;
  }
  L.gap_N0 = 1;
  return L;
}

void MomentVector::check_real(const Settings& cfg) const {
  if (d.size() > 0 && std::abs(d[0].imag()) > cfg.real_tol * std::max(std::abs(d[0]), 1e-300) &&
      d[0].imag() != 0.0) {
    throw InvalidArgument("d_0 must be real (Im d_0 = " + std::to_string(d[0].imag()) + ")");
  }
}

double h2m_norm(const MomentVector& d, const FrequencyLadder& ladder, int m) {
  if (d.size() > ladder.size()) throw InvalidArgument("moment vector longer than the ladder");
  double sum = 0.0;
  for (int j = 0; j < d.size(); ++j) {
    const double w = (j == 0) ? 1.0 : std::pow(ladder[j], m);
    sum += w * w * std::norm(d.d[j]);
  }
  return std::sqrt(sum);
}

MomentVector op_LN(const ControlSignal& u, int N, const FrequencyLadder& ladder, const Settings& cfg) {
  if (N < 0 || N >= ladder.size()) throw InvalidArgument("op_LN: N outside the ladder");
  MomentVector out = MomentVector::zero(ladder.size());
  for (int j = N; j < ladder.size(); ++j) out.d[j] = u.moment(ladder[j], cfg);
  return out;
}

ControlSignal op_PN(const MomentVector& d, int N, const BumpChi& chi, const FrequencyLadder& ladder, int order) {
  if (d.size() > ladder.size()) throw InvalidArgument("op_PN: moment vector longer than the ladder");
  for (int j = 0; j < std::min(N, d.size()); ++j) {
    if (d.d[j] != cdouble(0.0, 0.0)) throw UnsupportedIndexRange("op_PN: nonzero entry below N at j = " + std::to_string(j));
  }
  const TimeGrid& grid = chi.grid();
  const Eigen::MatrixXd tab = chi.derivative_table(order);
  Eigen::VectorXd core = Eigen::VectorXd::Zero(grid.nodes());
  for (int j = std::max(N, 0); j < d.size(); ++j) {
    const double weight = (j == 0 ? 1.0 : 2.0) / grid.T;
    const cdouble c = (j == 0) ? cdouble(d.d[0].real(), 0.0) : d.d[j];
    accumulate_mode(core, tab, order, ladder[j], c, weight, grid);
  }
  return ControlSignal(grid, order, std::move(core));
}

NeumannOperator::NeumannOperator(int N, const BumpChi& chi, const FrequencyLadder& ladder, int order,
                                 const Settings& cfg)
    : N_(N), chi_(chi), ladder_(ladder), order_(order), cfg_(cfg) {
  if (N < 1 || N >= ladder.size()) throw UnsupportedIndexRange("Neumann cutoff must satisfy 1 <= N < ladder size");
  chi_table_ = chi.derivative_table(order);
  const TimeGrid& grid = chi.grid();
  inverse_.resize(ladder.size());
  for (int j = N; j < ladder.size(); ++j) {
    Eigen::VectorXd cc = Eigen::VectorXd::Zero(grid.nodes());
    Eigen::VectorXd cs = Eigen::VectorXd::Zero(grid.nodes());
    accumulate_mode(cc, chi_table_, order, ladder[j], {1.0, 0.0}, 2.0 / grid.T, grid);
    accumulate_mode(cs, chi_table_, order, ladder[j], {0.0, 1.0}, 2.0 / grid.T, grid);
    const cdouble a = ControlSignal(grid, order, std::move(cc)).moment(ladder[j], cfg);
    const cdouble b = ControlSignal(grid, order, std::move(cs)).moment(ladder[j], cfg);
    Eigen::Matrix2d A;
    A << a.real(), b.real(), a.imag(), b.imag();
    inverse_[j] = A.inverse();
  }
}

ControlSignal NeumannOperator::build(const Eigen::VectorXcd& c) const {
  const TimeGrid& grid = chi_.grid();
  Eigen::VectorXd core = Eigen::VectorXd::Zero(grid.nodes());
  for (int j = N_; j < ladder_.size(); ++j) accumulate_mode(core, chi_table_, order_, ladder_[j], c[j], 2.0 / grid.T, grid);
  return ControlSignal(grid, order_, std::move(core));
}

ControlSignal NeumannOperator::P(const MomentVector& d) const {
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(ladder_.size());
  for (int j = N_; j < ladder_.size(); ++j) {
    const Eigen::Vector2d x = inverse_[j] * Eigen::Vector2d(d.d[j].real(), d.d[j].imag());
    c[j] = cdouble(x[0], x[1]);
  }
  return build(c);
}

MomentVector NeumannOperator::L(const ControlSignal& u) const { return op_LN(u, N_, ladder_, cfg_); }

SolveResult neumann_inverse(const MomentVector& d, int N, const BumpChi& chi, const FrequencyLadder& ladder,
                            double tol, const Settings& cfg, int order) {
  if (d.size() != ladder.size()) throw InvalidArgument("neumann_inverse: moment vector must span the ladder");
  for (int j = 0; j < std::min(N, d.size()); ++j) {
    if (d.d[j] != cdouble(0.0, 0.0)) throw UnsupportedIndexRange("neumann_inverse: target has entries below N");
  }
  SolveResult res{ControlSignal::zero(chi.grid(), order), {}};
  res.report.method = "neumann";
  res.report.N = N;
  const double dn = h0_norm_from(d.d, std::min(N, d.size()));
  res.report.residual_history.push_back(dn);
  if (dn == 0.0 || N >= ladder.size()) return res;

  NeumannOperator op(N, chi, ladder, order, cfg);
  MomentVector r = d;
  double rn = dn;
  double rho = 0.0;
  int it = 0;
  while (rn > tol * dn && it < cfg.max_neumann_iters) {
    const ControlSignal v = op.P(r);
    res.u += v;
    const MomentVector Lv = op.L(v);
    r.d -= Lv.d;
    const double next = h0_norm_from(r.d, N);
    ++it;
    res.report.residual_history.push_back(next);
    const double ratio = next / rn;
    // ratios at the rounding floor carry no information
    if (rn > 1e-13 * dn) rho = std::max(rho, ratio);
    if (it == cfg.probe_iters && rho >= cfg.contraction_ceiling) {
      throw NoContraction("rho = " + std::to_string(rho) + " at N = " + std::to_string(N) + "; increase N");
    }
    if (ratio > 0.9 && next < 1e-12 * dn) {
      rn = next;
      break;
    }
    rn = next;
  }
  res.report.iterations = it;
  res.report.rho = rho;
  res.report.converged = rn <= tol * dn || rn < 1e-12 * dn;
  res.report.max_residual = rn;
  res.report.target_scale = std::max(1.0, dn);
  return res;
}

double measure_contraction(int N, const BumpChi& chi, const FrequencyLadder& ladder, const Settings& cfg, int order,
                           std::uint64_t seed) {
  NeumannOperator op(N, chi, ladder, order, cfg);
  MomentVector r{random_unit(ladder.size(), N, seed == 0 ? cfg.seed : seed), {}};
  double rn = 1.0;
  double rho = 0.0;
  for (int it = 0; it < cfg.probe_iters; ++it) {
    const ControlSignal v = op.P(r);
    r.d -= op.L(v).d;
    const double next = h0_norm_from(r.d, N);
    if (rn > 1e-13 || it == 0) rho = std::max(rho, next / rn);
    rn = next;
  }
  return rho;
}

std::pair<int, double> select_cutoff(const BumpChi& chi, const FrequencyLadder& ladder, const Settings& cfg,
                                     int order) {
  int N = std::max(1, cfg.n_start);
  while (true) {
    if (N >= ladder.size()) return {N, 0.0};
    const double rho = measure_contraction(N, chi, ladder, cfg, order);
    if (rho <= cfg.contraction_target) return {N, rho};
    N *= 2;
    if (N > ladder.size() / 2) {
      throw NoContraction("no cutoff N <= " + std::to_string(ladder.size() / 2) + " reaches rho <= " +
                          std::to_string(cfg.contraction_target) + " (last rho " + std::to_string(rho) + ")");
    }
  }
}

ControlSignal low_freq_solver(const MomentVector& d, int N, int zero_upto, int k, const FrequencyLadder& ladder,
                              const TimeGrid& grid, const Settings& cfg, const std::vector<double>& bc_targets) {
  if (k < 0) throw OrderOutOfRange("negative regularity order");
  if (zero_upto >= ladder.size()) throw InvalidArgument("zero_upto beyond the ladder");
  if (d.size() > ladder.size()) throw InvalidArgument("moment vector longer than the ladder");
  d.check_real(cfg);
  const int n = grid.n_steps;
  const double h = grid.dt();
  const double T = grid.T;
  const int npoly = static_cast<int>(d.poly.size());
  std::vector<double> beta(k, 0.0);
  for (int m = 0; m < k && m < static_cast<int>(bc_targets.size()); ++m) beta[m] = bc_targets[m];

  for (int j = 1; j <= zero_upto; ++j) {
    if (std::abs(ladder[j]) * h > cfg.max_phase_per_step) {
      throw PhaseResolutionExceeded("low_freq_solver: omega_" + std::to_string(j) + " dt too large");
    }
  }
  auto target_of = [&](int j) -> cdouble { return (j < N && j < d.size()) ? d.d[j] : cdouble(0.0, 0.0); };

  const int D = k + npoly;  // polynomial block spans degrees 0..D
  const int rows = 2 * zero_upto + D + 1;
  Eigen::MatrixXd A(rows, n + 1);
  Eigen::VectorXd b(rows);
  const cdouble eT_unit(0.0, 1.0);

  int row = 0;
  for (int j = 1; j <= zero_upto; ++j) {
    const double om = ladder[j];
    const auto fw = filon_weights(n, h, om);
    for (int i = 0; i <= n; ++i) {
      A(row, i) = fw[i].real();
      A(row + 1, i) = fw[i].imag();
    }
    const cdouble iom(0.0, om);
    cdouble tgt = target_of(j);
    const cdouble eT = std::polar(1.0, om * T);
    cdouble ipow = iom;
    for (int m = 0; m < k; ++m) {
      tgt -= ((m % 2 == 0) ? 1.0 : -1.0) * beta[m] * eT / ipow;
      ipow *= iom;
    }
    tgt *= std::pow(cdouble(0.0, -om), k);
    b[row] = tgt.real();
    b[row + 1] = tgt.imag();
    row += 2;
  }

  // Polynomial kernels p_c of degree c with targets: terminal values, d_0, d_{-q}.
  auto kernel = [&](int c, double tau) -> double {
    if (c < k) return std::pow(T - tau, c) / factorial(c);
    if (c == k) return std::pow(T - tau, k) / factorial(k);
    const int q = c - k;
    if (k == 0) return std::pow(tau, q);
    double s = 0.0;
    for (int r = 0; r <= q; ++r) {
      s += binomial(q, r) * std::pow(tau, q - r) * std::pow(T - tau, r + k) / ((r + k) * factorial(k - 1));
    }
    return s;
  };
  Eigen::VectorXd ptarget(D + 1);
  for (int c = 0; c <= D; ++c) {
    if (c < k) ptarget[c] = beta[k - 1 - c];
    else if (c == k) ptarget[c] = (d.size() > 0 ? d.d[0].real() : 0.0);
    else ptarget[c] = d.poly[c - k - 1];
  }
  // p_c = sum_s M(c,s) L~_s with shifted Legendre L~_s(tau) = P_s(2 tau / T - 1)
  const GaussRule rule = gauss_legendre(D + 2, 0.0, T);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(D + 1, D + 1);
  for (size_t g = 0; g < rule.nodes.size(); ++g) {
    const double tau = rule.nodes[g];
    const auto P = legendre_values(D, 2.0 * tau / T - 1.0);
    for (int c = 0; c <= D; ++c) {
      const double pc = kernel(c, tau) * rule.weights[g];
      for (int s = 0; s <= c; ++s) M(c, s) += (2.0 * s + 1.0) / T * pc * P[s];
    }
  }
  const Eigen::VectorXd mu = M.triangularView<Eigen::Lower>().solve(ptarget);
  for (int s = 0; s <= D; ++s) {
    const auto hw = hat_weights(n, h, [&](double tau) { return legendre_values(s, 2.0 * tau / T - 1.0)[s]; },
                                s / 2 + 2);
    for (int i = 0; i <= n; ++i) A(row, i) = hw[i];
    b[row] = mu[s];
    ++row;
  }

  // minimize sum_i W_i w_i^2 subject to A w = b
  Eigen::VectorXd Winv = Eigen::VectorXd::Constant(n + 1, 1.0 / h);
  Winv[0] = Winv[n] = 2.0 / h;
  if (b.isZero(0.0)) return ControlSignal::zero(grid, k);
  const Eigen::MatrixXd AW = A * Winv.asDiagonal();
  const Eigen::MatrixXd G = AW * A.transpose();
  const Eigen::VectorXd s = G.diagonal().cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd Gs = s.asDiagonal() * G * s.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Gs, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = es.eigenvalues().maxCoeff();
  const double cond = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
  if (!(cond <= cfg.gram_cond_max)) {
    throw SingularGram("Gram condition number " + std::to_string(cond) + " exceeds " + std::to_string(cfg.gram_cond_max));
  }
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(Gs);
  const Eigen::VectorXd bs = s.asDiagonal() * b;
  Eigen::VectorXd y = ldlt.solve(bs);
  for (int it = 0; it < 2; ++it) y += ldlt.solve(bs - Gs * y);
  const Eigen::VectorXd lambda = s.asDiagonal() * y;
  Eigen::VectorXd w = AW.transpose() * lambda;
  return ControlSignal(grid, k, std::move(w));
}

SolverReport evaluate_solution(const ControlSignal& u, const MomentVector& d, const FrequencyLadder& ladder, int k,
                               int min_m, const Settings& cfg) {
  SolverReport rep;
  for (int j = 0; j < d.size(); ++j) {
    const cdouble mom = (j == 0) ? cdouble(u.primitive_at_end(1), 0.0) : u.moment(ladder[j], cfg);
    rep.residuals.push_back(std::abs(mom - d.d[j]));
  }
  for (int q = 1; q <= d.poly.size(); ++q) rep.residuals.push_back(std::abs(u.poly_moment(q) - d.poly[q - 1]));
  rep.max_residual = rep.residuals.empty() ? 0.0 : *std::max_element(rep.residuals.begin(), rep.residuals.end());
  rep.target_scale = std::max(1.0, std::sqrt(d.d.squaredNorm() + d.poly.squaredNorm()));
  for (int m = min_m; m <= std::min(k, u.order()); ++m) rep.norms[m] = u.sobolev_norm(m, cfg);
  for (int q = 2; q <= k + 1; ++q) rep.bc_values.push_back(u.primitive_at_end(q));
  return rep;
}

SolveResult combined_solver(const MomentVector& d, int k, const FrequencyLadder& ladder, const BumpChi& chi,
                            const Settings& cfg) {
  if (d.size() != ladder.size()) throw InvalidArgument("combined_solver: moment vector must span the ladder");
  d.check_real(cfg);
  const TimeGrid& grid = chi.grid();
  const int size = ladder.size();

  MomentVector hf = MomentVector::zero(size);
  int N = std::min(std::max(1, cfg.n_start), size);
  double rho = 0.0;
  bool has_hf = false;
  for (int j = N; j < size; ++j) has_hf = has_hf || d.d[j] != cdouble(0.0, 0.0);
  SolveResult hf_res{ControlSignal::zero(grid, k), {}};
  if (has_hf) {
    std::tie(N, rho) = select_cutoff(chi, ladder, cfg, k);
    for (int j = N; j < size; ++j) hf.d[j] = d.d[j];
    if (N < size) hf_res = neumann_inverse(hf, N, chi, ladder, 1e-3 * cfg.tol, cfg, k);
  }
  const ControlSignal& u_hf = hf_res.u;

  MomentVector lf = MomentVector::zero(size, static_cast<int>(d.poly.size()));
  for (int j = 0; j < std::min(N, size); ++j) {
    const cdouble m = (j == 0) ? cdouble(u_hf.primitive_at_end(1), 0.0) : u_hf.moment(ladder[j], cfg);
    lf.d[j] = d.d[j] - m;
  }
  lf.d[0] = lf.d[0].real();
  for (int q = 1; q <= lf.poly.size(); ++q) lf.poly[q - 1] = d.poly[q - 1] - u_hf.poly_moment(q);
  std::vector<double> beta(k);
  for (int m = 0; m < k; ++m) beta[m] = -u_hf.terminal(m);

  ControlSignal u = u_hf + low_freq_solver(lf, N, size - 1, k, ladder, grid, cfg, beta);
  SolveResult res{u, evaluate_solution(u, d, ladder, k, -(k + 1), cfg)};
  res.report.method = "combined";
  res.report.N = N;
  res.report.rho = std::max(rho, hf_res.report.rho);
  res.report.iterations = hf_res.report.iterations;
  res.report.residual_history = hf_res.report.residual_history;
  res.report.converged = hf_res.report.converged;
  return res;
}

SolveResult weak_estimate_solver(const MomentVector& d, int k, const FrequencyLadder& ladder, const BumpChi& chi,
                                 const Settings& cfg) {
  if (k < 0) throw OrderOutOfRange("negative regularity order");
  if (d.size() != ladder.size()) throw InvalidArgument("weak_estimate_solver: moment vector must span the ladder");
  d.check_real(cfg);
  const int size = ladder.size();

  MomentVector e = MomentVector::zero(size);
  for (int j = 1; j < size; ++j) e.d[j] = d.d[j] / std::pow(cdouble(0.0, -ladder[j]), k + 1);
  const SolveResult high = combined_solver(e, 2 * k + 1, ladder, chi, cfg);
  const ControlSignal v = high.u.derivative(k + 1);

  MomentVector corr = MomentVector::zero(size, k);
  const double d0 = d.d[0].real();
  corr.d[0] = d0;
  for (int q = 1; q <= k; ++q) corr.poly[q - 1] = std::pow(chi.grid().T, q) * d0;
  const SolveResult low = combined_solver(corr, k, ladder, chi, cfg);

  ControlSignal u = v + low.u;
  SolveResult res{u, evaluate_solution(u, d, ladder, k, -(k + 1), cfg)};
  res.report.method = "weak_estimate";
  res.report.N = high.report.N;
  res.report.rho = high.report.rho;
  res.report.iterations = high.report.iterations;
  res.report.residual_history = high.report.residual_history;
  res.report.converged = high.report.converged && low.report.converged;
  return res;
}

}  // namespace stlc
