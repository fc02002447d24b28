#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace stlc {

using cdouble = std::complex<double>;

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule with `order` points on [a, b].
GaussRule gauss_legendre(int order, double a = -1.0, double b = 1.0);

/// Values L_0(x)..L_degree(x) of the Legendre polynomials on [-1, 1].
std::vector<double> legendre_values(int degree, double x);

/// Exponential-polynomial cell integrals
///   E_r(omega, h) = int_0^h s^r / r! * exp(i omega s) ds,  r = 0..max_r.
/// Series expansion for small omega*h, upward recurrence otherwise.
std::vector<cdouble> exp_poly_integrals(int max_r, double omega, double h);

/// Per-node weights of the Filon-trapezoid rule: for the piecewise-linear
/// interpolant f_h of node values f_i on a uniform grid starting at 0,
///   int_0^{n h} f_h(t) exp(i omega t) dt = sum_i weights[i] * f_i
/// exactly, for any omega.
std::vector<cdouble> filon_weights(int n_steps, double h, double omega);

/// Per-node weights w_i with sum_i w_i f_i = int_0^{nh} g(t) f_h(t) dt,
/// using `points` Gauss nodes per cell (exact when g is a polynomial of
/// degree <= 2*points - 2).
std::vector<double> hat_weights(int n_steps, double h, const std::function<double(double)>& g, int points);

/// Rotating phase exp(i omega t_i) along a uniform grid. Multiplies by a
/// fixed step factor and re-anchors on an exact evaluation every 64 steps.
class PhaseWalker {
 public:
  PhaseWalker(double omega, double h) : omega_(omega), h_(h), step_(std::polar(1.0, omega * h)) {}
  cdouble at(int i) {
    if (i % kResync == 0 || i != last_ + 1) {
      current_ = std::polar(1.0, omega_ * h_ * i);
    } else {
      current_ *= step_;
    }
    last_ = i;
    return current_;
  }

 private:
  static constexpr int kResync = 64;
  double omega_;
  double h_;
  cdouble step_;
  cdouble current_{1.0, 0.0};
  int last_ = -2;
};

}  // namespace stlc
