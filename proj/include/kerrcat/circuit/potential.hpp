#pragma once
#include <cmath>
#include <vector>

#include "kerrcat/common.hpp"

namespace kerrcat::circuit {

// Scaled potential of the double-SNAIL loop (six large junctions in series,
// shunted by the alpha junction, flux-biased):
//   u(phi) = U(phi)/E_J = -6 cos(phi/6) - 2 alpha cos(phi/2 + phi_ext)
struct Potential {
  double alpha = 0.0;
  double phi_ext = 0.0;

  double value(double phi) const {
    return -6.0 * std::cos(phi / 6.0) -
           2.0 * alpha * std::cos(0.5 * phi + phi_ext);
  }

  // closed-form n-th derivative (d/dphi)^n u, n >= 0
  double derivative(double phi, int n) const {
    const double s = 0.5 * M_PI * n;
    return -6.0 * std::pow(1.0 / 6.0, n) * std::cos(phi / 6.0 + s) -
           2.0 * alpha * std::pow(0.5, n) * std::cos(0.5 * phi + phi_ext + s);
  }

  // Well minimum nearest phi = 0: golden-section bracket, Newton polish.
  double minimum() const {
    double a = -M_PI, b = M_PI;
    const double gr = 0.6180339887498949;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    for (int it = 0; it < 200 && (b - a) > 1e-10; ++it) {
      if (value(c) < value(d)) { b = d; } else { a = c; }
      c = b - gr * (b - a);
      d = a + gr * (b - a);
    }
    double x = 0.5 * (a + b);
    for (int it = 0; it < 60; ++it) {
      double f1 = derivative(x, 1), f2 = derivative(x, 2);
      if (f2 <= 0) break;
      double step = f1 / f2;
      x -= step;
      if (std::abs(step) < 1e-15) break;
    }
    KC_REQUIRE(derivative(x, 2) > 0, "potential: expansion point is not a stable minimum");
    return x;
  }
};

// Harmonic frame + Taylor data about the well minimum.
//   c[n]   = u^(n)(phi_min)                      (dimensionless)
//   omega0 = sqrt(8 E_C E_J c2)                  (rad/s)
//   g[n]   = E_J c_n phi_zpf^n / (n-1)!  (n>=3)  (rad/s)
struct TaylorFrame {
  double phi_min = 0;
  std::vector<double> c;
  double omega0 = 0;
  double phi_zpf = 0;
  double n_zpf = 0;
  std::vector<double> g;
};

inline TaylorFrame taylor_coefficients(double E_J, double E_C, double alpha,
                                       double phi_ext, int max_order = 6) {
  KC_REQUIRE(E_J > 0 && E_C > 0, "taylor_coefficients: E_J, E_C must be positive");
  KC_REQUIRE(max_order >= 2, "taylor_coefficients: need at least second order");
  Potential pot{alpha, phi_ext};
  TaylorFrame tf;
  tf.phi_min = pot.minimum();
  tf.c.resize(max_order + 1);
  for (int n = 0; n <= max_order; ++n) tf.c[n] = pot.derivative(tf.phi_min, n);
  const double c2 = tf.c[2];
  KC_REQUIRE(c2 > 0, "taylor_coefficients: non-positive curvature at minimum");
  tf.omega0 = std::sqrt(8.0 * E_C * E_J * c2);
  tf.phi_zpf = std::pow(2.0 * E_C / (E_J * c2), 0.25);
  tf.n_zpf = 0.5 / tf.phi_zpf;
  tf.g.assign(max_order + 1, 0.0);
  double fact = 2.0;  // (n-1)! starting at n = 3
  for (int n = 3; n <= max_order; ++n) {
    tf.g[n] = E_J * tf.c[n] * std::pow(tf.phi_zpf, n) / fact;
    fact *= n;
  }
  return tf;
}

}  // namespace kerrcat::circuit
