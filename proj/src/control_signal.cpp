#include "stlc/control_signal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stlc/errors.hpp"

namespace stlc {

TimeGrid::TimeGrid(double T_, int n) : T(T_), n_steps(n) {
  if (!(T > 0.0)) throw InvalidArgument("grid: T must be positive");
  if (n < 1) throw InvalidArgument("grid: n_steps must be positive");
}

ControlSignal::ControlSignal(TimeGrid grid, int order, Eigen::VectorXd core)
    : grid_(grid), order_(order), core_(std::move(core)) {
  if (order_ < 0) throw OrderOutOfRange("negative signal order");
  if (core_.size() != grid_.nodes()) throw InvalidArgument("core length does not match the grid");
  build_table();
}

ControlSignal ControlSignal::zero(const TimeGrid& grid, int order) {
  return ControlSignal(grid, order, Eigen::VectorXd::Zero(grid.nodes()));
}

ControlSignal ControlSignal::from_samples(const TimeGrid& grid, Eigen::VectorXd samples) {
  return ControlSignal(grid, 0, std::move(samples));
}

ControlSignal ControlSignal::from_core_function(const TimeGrid& grid, int order,
                                                const std::function<double(double)>& f) {
  Eigen::VectorXd w(grid.nodes());
  for (int i = 0; i < grid.nodes(); ++i) w[i] = f(grid.t(i));
  return ControlSignal(grid, order, std::move(w));
}

void ControlSignal::build_table() {
  const int K = order_;
  const int n = grid_.n_steps;
  const double h = grid_.dt();
  auto tab = std::make_shared<Eigen::MatrixXd>(Eigen::MatrixXd::Zero(n + 1, K + 1));
  Eigen::MatrixXd& S = *tab;
  // hp[m] = h^m / m!
  std::vector<double> hp(K + 2);
  hp[0] = 1.0;
  for (int m = 1; m <= K + 1; ++m) hp[m] = hp[m - 1] * h / m;
  std::vector<double> a(K + 2);
  S(0, K) = core_[0];
  for (int i = 0; i < n; ++i) {
    for (int q = 0; q < K; ++q) a[q] = S(i, q);
    a[K] = core_[i];
    a[K + 1] = (core_[i + 1] - core_[i]) / h;
    for (int r = 0; r < K; ++r) {
      double s = 0.0;
      for (int q = K + 1; q >= r; --q) s += a[q] * hp[q - r];
      S(i + 1, r) = s;
    }
    S(i + 1, K) = core_[i + 1];
  }
  table_ = std::move(tab);
}

void ControlSignal::cell_coeffs(int i, double* a) const {
  const int K = order_;
  for (int q = 0; q < K; ++q) a[q] = (*table_)(i, q);
  a[K] = core_[i];
  a[K + 1] = (core_[i + 1] - core_[i]) / grid_.dt();
}

Eigen::VectorXd ControlSignal::derivative_samples(int r) const {
  if (r < 0 || r > order_) throw OrderOutOfRange("derivative order " + std::to_string(r));
  return table_->col(r);
}

double ControlSignal::value(double t) const {
  const double h = grid_.dt();
  int i = static_cast<int>(std::floor(t / h));
  i = std::clamp(i, 0, grid_.n_steps - 1);
  const double s = t - i * h;
  std::vector<double> a(order_ + 2);
  cell_coeffs(i, a.data());
  double v = 0.0;
  for (int q = order_ + 1; q >= 0; --q) v = v * s / (q + 1) + a[q];
  return v;
}

ControlSignal ControlSignal::derivative(int r) const {
  if (r < 0 || r > order_) throw OrderOutOfRange("derivative order " + std::to_string(r));
  ControlSignal out;
  out.grid_ = grid_;
  out.order_ = order_ - r;
  out.core_ = core_;
  out.table_ = std::make_shared<Eigen::MatrixXd>(table_->rightCols(order_ - r + 1));
  return out;
}

ControlSignal ControlSignal::integrated(int n) const {
  if (n < 0) throw OrderOutOfRange("negative primitive order");
  if (n == 0) return *this;
  return ControlSignal(grid_, order_ + n, core_);
}

Eigen::VectorXd ControlSignal::primitive(int n, const Settings& cfg) const {
  if (n < 0 || n > cfg.max_primitive_order) throw OrderOutOfRange("primitive order " + std::to_string(n));
  return integrated(n).samples();
}

double ControlSignal::primitive_at_end(int n) const { return integrated(n).terminal(0); }

double ControlSignal::l2_norm() const {
  const int K = order_;
  const GaussRule rule = gauss_legendre(K + 2, 0.0, grid_.dt());
  std::vector<double> a(K + 2);
  double sum = 0.0;
  for (int i = 0; i < grid_.n_steps; ++i) {
    cell_coeffs(i, a.data());
    for (size_t g = 0; g < rule.nodes.size(); ++g) {
      const double s = rule.nodes[g];
      double v = 0.0;
      for (int q = K + 1; q >= 0; --q) v = v * s / (q + 1) + a[q];
      sum += rule.weights[g] * v * v;
    }
  }
  return std::sqrt(sum);
}

double ControlSignal::sup_norm() const { return table_->col(0).cwiseAbs().maxCoeff(); }

double ControlSignal::sobolev_norm(int m, const Settings& cfg) const {
  if (m > order_) throw OrderOutOfRange("H^" + std::to_string(m) + " norm of an order-" + std::to_string(order_) + " signal");
  if (m >= 0) return derivative(m).l2_norm();
  if (-m > cfg.max_primitive_order) throw OrderOutOfRange("primitive order " + std::to_string(-m));
  return std::abs(primitive_at_end(1)) + integrated(-m).l2_norm();
}

cdouble ControlSignal::moment(double omega, const Settings& cfg) const {
  if (std::abs(omega) * grid_.dt() > cfg.max_phase_per_step) {
    throw PhaseResolutionExceeded("omega*dt = " + std::to_string(std::abs(omega) * grid_.dt()) + " > " +
                                  std::to_string(cfg.max_phase_per_step));
  }
  return moment_unchecked(omega);
}

cdouble ControlSignal::moment_unchecked(double omega) const {
  const int K = order_;
  const double h = grid_.dt();
  const auto E = exp_poly_integrals(K + 1, omega, h);
  std::vector<double> a(K + 2);
  PhaseWalker phase(omega, h);
  cdouble sum(0.0, 0.0);
  for (int i = 0; i < grid_.n_steps; ++i) {
    cell_coeffs(i, a.data());
    cdouble cell(0.0, 0.0);
    for (int q = 0; q <= K + 1; ++q) cell += a[q] * E[q];
    sum += phase.at(i) * cell;
  }
  return sum;
}

double ControlSignal::poly_moment(int q) const {
  const int K = order_;
  const double h = grid_.dt();
  const GaussRule rule = gauss_legendre((q + K + 1) / 2 + 1, 0.0, h);
  std::vector<double> a(K + 2);
  double sum = 0.0;
  for (int i = 0; i < grid_.n_steps; ++i) {
    cell_coeffs(i, a.data());
    for (size_t g = 0; g < rule.nodes.size(); ++g) {
      const double s = rule.nodes[g];
      double v = 0.0;
      for (int r = K + 1; r >= 0; --r) v = v * s / (r + 1) + a[r];
      sum += rule.weights[g] * std::pow(i * h + s, q) * v;
    }
  }
  return sum;
}

bool ControlSignal::in_h0k(const Settings& cfg) const {
  for (int m = 0; m < order_; ++m) {
    const double scale = table_->col(m).cwiseAbs().maxCoeff();
    if (std::abs(terminal(m)) > cfg.bc_tol * scale) return false;
  }
  return true;
}

ControlSignal& ControlSignal::operator+=(const ControlSignal& o) {
  if (!(grid_ == o.grid_) || order_ != o.order_) throw InvalidArgument("adding signals of different grid or order");
  core_ += o.core_;
  table_ = std::make_shared<Eigen::MatrixXd>(*table_ + *o.table_);
  return *this;
}

ControlSignal& ControlSignal::operator*=(double a) {
  core_ *= a;
  table_ = std::make_shared<Eigen::MatrixXd>(a * *table_);
  return *this;
}

double bump_integral() {
  static const double value = [] {
    const int panels = 256;
    const GaussRule rule = gauss_legendre(16, 0.0, 2.0 / panels);
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double s0 = -1.0 + 2.0 * p / panels;
      for (size_t g = 0; g < rule.nodes.size(); ++g) {
        const double s = s0 + rule.nodes[g];
        sum += rule.weights[g] * std::exp(-1.0 / (1.0 - s * s));
      }
    }
    return sum;
  }();
  return value;
}

BumpChi::BumpChi(const TimeGrid& grid, double margin) : grid_(grid), margin_(margin) {
  if (!(margin > 0.0 && margin < grid.T / 2.0)) throw BadMargin("margin must lie in (0, T/2)");
  half_width_ = (grid.T - 2.0 * margin) / 2.0;
  kappa_ = grid.T / (half_width_ * bump_integral());
}

std::vector<double> BumpChi::derivatives(double t, int max_r) const {
  std::vector<double> out(max_r + 1, 0.0);
  const double s = (t - grid_.T / 2.0) / half_width_;
  if (std::abs(s) >= 1.0) return out;
  const double g0 = -1.0 / (1.0 - s * s);
  if (g0 < -600.0) return out;
  // g^{(i)}(s) for i = 1..max_r
  std::vector<double> g(max_r + 1, 0.0);
  double fact = 1.0;
  for (int i = 1; i <= max_r; ++i) {
    fact *= i;
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    g[i] = -0.5 * fact * (std::pow(1.0 - s, -(i + 1)) + sign * std::pow(1.0 + s, -(i + 1)));
  }
  std::vector<double> hder(max_r + 1, 0.0);
  hder[0] = std::exp(g0);
  for (int n = 0; n < max_r; ++n) {
    double acc = 0.0;
    double binom = 1.0;
    for (int i = 0; i <= n; ++i) {
      acc += binom * g[i + 1] * hder[n - i];
      binom = binom * (n - i) / (i + 1);
    }
    hder[n + 1] = acc;
  }
  double scale = kappa_;
  for (int r = 0; r <= max_r; ++r) {
    out[r] = scale * hder[r];
    scale /= half_width_;
  }
  return out;
}

Eigen::VectorXd BumpChi::samples() const { return derivative_table(0).col(0); }

Eigen::MatrixXd BumpChi::derivative_table(int max_r) const {
  Eigen::MatrixXd tab(grid_.nodes(), max_r + 1);
  for (int i = 0; i < grid_.nodes(); ++i) {
    const auto d = derivatives(grid_.t(i), max_r);
    for (int r = 0; r <= max_r; ++r) tab(i, r) = d[r];
  }
  return tab;
}

}  // namespace stlc
