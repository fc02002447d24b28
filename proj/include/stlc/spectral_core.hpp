#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stlc/quadrature.hpp"
#include "stlc/settings.hpp"

namespace stlc {

/// Dirichlet Laplacian on (0, 1): lambda_j = (j pi)^2, phi_j = sqrt(2) sin(j pi x).
/// Mode j (1-based) lives at vector index j - 1 everywhere in the library.
class EigenBasis {
 public:
  explicit EigenBasis(int j_max, int quad_order = 0);

  int j_max() const { return j_max_; }
  double lambda(int j) const { return lambda_[j - 1]; }
  const Eigen::VectorXd& lambdas() const { return lambda_; }
  const GaussRule& quadrature() const { return quad_; }
  static double phi(int j, double x);

  /// Largest |<phi_j, phi_k>_quad - delta_jk| over the truncation.
  double orthonormality_defect() const;

 private:
  int j_max_;
  Eigen::VectorXd lambda_;
  GaussRule quad_;
};

struct ModalState {
  Eigen::VectorXcd coeffs;

  ModalState() = default;
  explicit ModalState(Eigen::VectorXcd c) : coeffs(std::move(c)) {}
  static ModalState zero(int j_max) { return ModalState(Eigen::VectorXcd::Zero(j_max)); }
  static ModalState unit(int j_max, int j);
  int size() const { return static_cast<int>(coeffs.size()); }
};

/// <a, b> = sum_j a_j conj(b_j).
cdouble inner(const ModalState& a, const ModalState& b);

/// (sum_j |j^s c_j|^2)^{1/2}. Negative s is accepted (weights j^s < 1).
double hs_norm(const ModalState& state, double s);

class ProjectionSet {
 public:
  ProjectionSet(std::vector<int> indices, int j_max);
  static ProjectionSet range(int first, int last, int j_max);
  const std::vector<int>& indices() const { return indices_; }
  bool contains(int j) const;
  int max_index() const { return indices_.back(); }

 private:
  std::vector<int> indices_;
  std::vector<bool> mask_;
};

ModalState project_J(const ModalState& state, const ProjectionSet& J);

/// xi - Re<xi, psi> psi; psi must lie on the unit sphere.
ModalState project_tangent(const ModalState& xi, const ModalState& psi, const Settings& cfg = {});

/// Real dipole profile mu(x). Odd derivatives at both ends are carried exactly:
/// odd0[n] = mu^{(2n+1)}(0), odd1[n] = mu^{(2n+1)}(1). Beyond the stored
/// length they are unknown unless `odd_complete` is set (then zero).
struct MuSpec {
  std::string name;
  std::function<double(double)> eval;
  std::vector<double> odd0;
  std::vector<double> odd1;
  bool odd_complete = false;

  static MuSpec polynomial(const std::vector<double>& coeffs, std::string name = "poly");
  static MuSpec builtin(const std::string& name);

  /// mu^{(2n+1)} at the ends, or nullopt when not known.
  std::optional<std::pair<double, double>> odd_derivative(int n) const;
};

struct DipoleOperator {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd b;
  int p = 0;
  std::optional<double> decay_constant;
  /// Leading-order prediction of b_j from the boundary odd derivatives, when available.
  Eigen::VectorXd asymptotic_b;
  /// mu^{(2n+1)}(0) = mu^{(2n+1)}(1) = 0 for n < required_odd_zeros.
  bool boundary_hypothesis = false;
  int required_odd_zeros = 0;
  double norm2 = 0.0;
};

DipoleOperator build_dipole(const MuSpec& mu, const EigenBasis& basis, int p, const ProjectionSet& J,
                            const Settings& cfg = {}, int k = 0);

/// phi_1 e^{-i lambda_1 t} and its siblings: the free evolution of a state.
ModalState free_evolution(const EigenBasis& basis, const ModalState& c0, double t);

}  // namespace stlc
