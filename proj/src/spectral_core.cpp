#include "stlc/spectral_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "stlc/errors.hpp"

namespace stlc {

namespace {
constexpr double kPi = std::numbers::pi;
}

EigenBasis::EigenBasis(int j_max, int quad_order) : j_max_(j_max) {
  if (j_max < 1) throw InvalidArgument("j_max must be positive");
  if (quad_order == 0) quad_order = 4 * j_max;
  if (quad_order < 2 * j_max) throw InvalidArgument("quadrature order must be at least 2*j_max");
  quad_ = gauss_legendre(quad_order, 0.0, 1.0);
  lambda_.resize(j_max);
  for (int j = 1; j <= j_max; ++j) lambda_[j - 1] = (j * kPi) * (j * kPi);
}

double EigenBasis::phi(int j, double x) { return std::numbers::sqrt2 * std::sin(j * kPi * x); }

double EigenBasis::orthonormality_defect() const {
  const int nq = static_cast<int>(quad_.nodes.size());
  Eigen::MatrixXd S(nq, j_max_);
  for (int q = 0; q < nq; ++q) {
    for (int j = 1; j <= j_max_; ++j) S(q, j - 1) = phi(j, quad_.nodes[q]) * std::sqrt(quad_.weights[q]);
  }
  const Eigen::MatrixXd G = S.transpose() * S;
  return (G - Eigen::MatrixXd::Identity(j_max_, j_max_)).cwiseAbs().maxCoeff();
}

ModalState ModalState::unit(int j_max, int j) {
  ModalState s = zero(j_max);
  s.coeffs[j - 1] = 1.0;
  return s;
}

cdouble inner(const ModalState& a, const ModalState& b) {
  if (a.size() != b.size()) throw InvalidArgument("inner: dimension mismatch");
  return b.coeffs.dot(a.coeffs);  // Eigen conjugates the left operand
}

double hs_norm(const ModalState& state, double s) {
  double sum = 0.0;
  for (int j = 1; j <= state.size(); ++j) {
    const double w = std::pow(static_cast<double>(j), s);
    sum += w * w * std::norm(state.coeffs[j - 1]);
  }
  return std::sqrt(sum);
}

ProjectionSet::ProjectionSet(std::vector<int> indices, int j_max) : indices_(std::move(indices)) {
  if (indices_.empty()) throw InvalidArgument("projection set is empty");
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
  if (indices_.front() < 1 || indices_.back() > j_max) {
    throw InvalidArgument("projection set index outside 1.." + std::to_string(j_max));
  }
  mask_.assign(j_max + 1, false);
  for (int j : indices_) mask_[j] = true;
}

ProjectionSet ProjectionSet::range(int first, int last, int j_max) {
  std::vector<int> idx;
  for (int j = first; j <= last; ++j) idx.push_back(j);
  return ProjectionSet(idx, j_max);
}

bool ProjectionSet::contains(int j) const { return j >= 0 && j < static_cast<int>(mask_.size()) && mask_[j]; }

ModalState project_J(const ModalState& state, const ProjectionSet& J) {
  ModalState out = state;
  for (int j = 1; j <= out.size(); ++j) {
    if (!J.contains(j)) out.coeffs[j - 1] = 0.0;
  }
  return out;
}

ModalState project_tangent(const ModalState& xi, const ModalState& psi, const Settings& cfg) {
  const double n = hs_norm(psi, 0.0);
  if (std::abs(n - 1.0) > cfg.sphere_tol) {
    throw SphereViolation("project_tangent: |psi| = " + std::to_string(n));
  }
  const double re = inner(xi, psi).real();
  return ModalState(xi.coeffs - re * psi.coeffs);
}

MuSpec MuSpec::polynomial(const std::vector<double>& coeffs, std::string name) {
  MuSpec mu;
  mu.name = std::move(name);
  mu.eval = [coeffs](double x) {
    double v = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * x + *it;
    return v;
  };
  const int deg = static_cast<int>(coeffs.size()) - 1;
  for (int d = 1; d <= std::max(deg, 1); d += 2) {
    double at0 = 0.0, at1 = 0.0;
    for (int n = d; n <= deg; ++n) {
      double falling = 1.0;
      for (int i = 0; i < d; ++i) falling *= (n - i);
      at1 += falling * coeffs[n];
      if (n == d) at0 = falling * coeffs[n];
    }
    mu.odd0.push_back(at0);
    mu.odd1.push_back(at1);
  }
  mu.odd_complete = true;
  return mu;
}

MuSpec MuSpec::builtin(const std::string& name) {
  if (name == "x") return polynomial({0.0, 1.0}, "x");
  if (name == "x2") return polynomial({0.0, 0.0, 1.0}, "x2");
  if (name == "one" || name == "1") return polynomial({1.0}, "one");
  throw InvalidArgument("unknown builtin mu '" + name + "'");
}

std::optional<std::pair<double, double>> MuSpec::odd_derivative(int n) const {
  if (n < static_cast<int>(odd0.size())) return std::make_pair(odd0[n], odd1[n]);
  if (odd_complete) return std::make_pair(0.0, 0.0);
  return std::nullopt;
}

DipoleOperator build_dipole(const MuSpec& mu, const EigenBasis& basis, int p, const ProjectionSet& J,
                            const Settings& cfg, int k) {
  if (p < 0) throw InvalidArgument("p must be nonnegative");
  const int jm = basis.j_max();
  if (J.max_index() > jm) throw InvalidArgument("projection set exceeds the basis");
  const auto& quad = basis.quadrature();
  const int nq = static_cast<int>(quad.nodes.size());

  Eigen::MatrixXd S(nq, jm);
  Eigen::VectorXd wmu(nq);
  for (int q = 0; q < nq; ++q) {
    wmu[q] = quad.weights[q] * mu.eval(quad.nodes[q]);
    for (int j = 1; j <= jm; ++j) S(q, j - 1) = EigenBasis::phi(j, quad.nodes[q]);
  }
  DipoleOperator D;
  D.p = p;
  D.matrix = S.transpose() * wmu.asDiagonal() * S;
  // exact symmetry
  D.matrix = 0.5 * (D.matrix + D.matrix.transpose()).eval();
  D.b = D.matrix.row(0).transpose();

  double c = std::numeric_limits<double>::infinity();
  for (int j : J.indices()) c = std::min(c, std::pow(static_cast<double>(j), 2 * p + 3) * std::abs(D.b[j - 1]));
  if (!(c > cfg.decay_floor)) {
    throw DecayViolation("min_{j in J} j^{2p+3}|b_j| = " + std::to_string(c) + " at p = " + std::to_string(p));
  }
  D.decay_constant = c;

  D.asymptotic_b = Eigen::VectorXd::Constant(jm, std::numeric_limits<double>::quiet_NaN());
  if (auto od = mu.odd_derivative(p)) {
    const double scale = (p % 2 == 0 ? 1.0 : -1.0) * 2.0 * (2 * p + 2) / std::pow(kPi, 2 * p + 2);
    for (int j = 1; j <= jm; ++j) {
      const double sign = (j % 2 == 1) ? 1.0 : -1.0;
      D.asymptotic_b[j - 1] = scale / std::pow(static_cast<double>(j), 2 * p + 3) * (sign * od->second - od->first);
    }
  }

  D.required_odd_zeros = p + k;
  D.boundary_hypothesis = true;
  for (int n = 0; n < p + k; ++n) {
    auto od = mu.odd_derivative(n);
    if (!od || od->first != 0.0 || od->second != 0.0) D.boundary_hypothesis = false;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D.matrix, Eigen::EigenvaluesOnly);
  D.norm2 = es.eigenvalues().cwiseAbs().maxCoeff();
  return D;
}

ModalState free_evolution(const EigenBasis& basis, const ModalState& c0, double t) {
  ModalState out = c0;
  for (int j = 1; j <= out.size(); ++j) out.coeffs[j - 1] *= std::polar(1.0, -basis.lambda(j) * t);
  return out;
}

}  // namespace stlc
