#include "stlc/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "stlc/errors.hpp"

namespace stlc {

GaussRule gauss_legendre(int order, double a, double b) {
  if (order < 1) throw InvalidArgument("gauss_legendre: order must be positive");
  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  for (int i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int n = 2; n <= order; ++n) {
        const double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
        p0 = p1;
        p1 = p2;
      }
      if (order == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int n = 2; n <= order; ++n) {
      const double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
      p0 = p1;
      p1 = p2;
    }
    dp = order == 1 ? 1.0 : order * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = mid - half * x;
    rule.nodes[order - 1 - i] = mid + half * x;
    rule.weights[i] = half * w;
    rule.weights[order - 1 - i] = half * w;
  }
  if (order == 1) {
    rule.nodes[0] = mid;
    rule.weights[0] = 2.0 * half;
  }
  return rule;
}

std::vector<double> legendre_values(int degree, double x) {
  std::vector<double> p(degree + 1);
  p[0] = 1.0;
  if (degree >= 1) p[1] = x;
  for (int n = 1; n < degree; ++n) {
    p[n + 1] = ((2.0 * n + 1.0) * x * p[n] - n * p[n - 1]) / (n + 1.0);
  }
  return p;
}

std::vector<cdouble> exp_poly_integrals(int max_r, double omega, double h) {
  std::vector<cdouble> out(max_r + 1);
  const double x = omega * h;
  const cdouble ix(0.0, x);
  if (std::abs(x) <= std::max(2.0, static_cast<double>(max_r))) {
    // e_r(x) = sum_n (ix)^n / (n! r! (r + n + 1))
    double rfact = 1.0;
    for (int r = 0; r <= max_r; ++r) {
      if (r > 0) rfact *= r;
      cdouble term(1.0, 0.0);  // (ix)^n / n!
      cdouble sum = term / static_cast<double>(r + 1);
      for (int n = 1; n < 200; ++n) {
        term *= ix / static_cast<double>(n);
        const cdouble add = term / static_cast<double>(r + n + 1);
        sum += add;
        if (std::abs(add) < 1e-18 * std::abs(sum)) break;
      }
      out[r] = sum / rfact;
    }
  } else {
    const cdouble e = std::polar(1.0, x);
    out[0] = (e - 1.0) / ix;
    double rfact = 1.0;
    for (int r = 1; r <= max_r; ++r) {
      rfact *= r;
      out[r] = (e / rfact - out[r - 1]) / ix;
    }
  }
  double hp = h;
  for (int r = 0; r <= max_r; ++r) {
    out[r] *= hp;
    hp *= h;
  }
  return out;
}

std::vector<cdouble> filon_weights(int n_steps, double h, double omega) {
  std::vector<cdouble> w(n_steps + 1, cdouble(0.0, 0.0));
  const auto e = exp_poly_integrals(1, omega, h);
  const cdouble left = e[0] - e[1] / h;
  const cdouble right = e[1] / h;
  PhaseWalker phase(omega, h);
  for (int i = 0; i < n_steps; ++i) {
    const cdouble ph = phase.at(i);
    w[i] += ph * left;
    w[i + 1] += ph * right;
  }
  return w;
}

std::vector<double> hat_weights(int n_steps, double h, const std::function<double(double)>& g, int points) {
  std::vector<double> w(n_steps + 1, 0.0);
  const GaussRule rule = gauss_legendre(points, 0.0, 1.0);
  for (int i = 0; i < n_steps; ++i) {
    const double t0 = i * h;
    for (int q = 0; q < points; ++q) {
      const double s = rule.nodes[q];
      const double gv = g(t0 + s * h) * rule.weights[q] * h;
      w[i] += gv * (1.0 - s);
      w[i + 1] += gv * s;
    }
  }
  return w;
}

}  // namespace stlc
