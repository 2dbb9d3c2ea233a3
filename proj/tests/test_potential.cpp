#include <catch2/catch_amalgamated.hpp>

#include "kerrcat/circuit/potential.hpp"
#include "kerrcat/units.hpp"

using namespace kerrcat;
using namespace kerrcat::circuit;

namespace {
// high-order central finite difference of the potential value, the
// independent oracle for the closed-form derivatives
double fd_derivative(const Potential& p, double phi, int n, double h) {
  if (n == 0) return p.value(phi);
  // 9-point first derivative applied recursively would amplify noise;
  // instead use direct central stencils per order (n <= 4) and recurse above
  switch (n) {
    case 1:
      return (-p.value(phi + 2 * h) + 8 * p.value(phi + h) - 8 * p.value(phi - h) +
              p.value(phi - 2 * h)) / (12 * h);
    case 2:
      return (-p.value(phi + 2 * h) + 16 * p.value(phi + h) - 30 * p.value(phi) +
              16 * p.value(phi - h) - p.value(phi - 2 * h)) / (12 * h * h);
    case 3:
      return (p.value(phi + 2 * h) - 2 * p.value(phi + h) + 2 * p.value(phi - h) -
              p.value(phi - 2 * h)) / (2 * h * h * h);
    case 4:
      return (p.value(phi + 2 * h) - 4 * p.value(phi + h) + 6 * p.value(phi) -
              4 * p.value(phi - h) + p.value(phi - 2 * h)) / (h * h * h * h);
    default:
      return (fd_derivative(p, phi + h, n - 1, h) -
              fd_derivative(p, phi - h, n - 1, h)) / (2 * h);
  }
}
}  // namespace

TEST_CASE("closed-form derivatives agree with finite differences", "[potential]") {
  Potential p{0.046, 0.33 * two_pi};
  for (double phi : {-1.3, -0.25, 0.0, 0.4, 2.0}) {
    for (int n = 1; n <= 6; ++n) {
      double h = (n <= 4) ? 1e-2 : 3e-2;
      double fd = fd_derivative(p, phi, n, h);
      double cf = p.derivative(phi, n);
      REQUIRE_THAT(cf, Catch::Matchers::WithinAbs(fd, 5e-6 + 1e-5 * std::abs(fd)));
    }
  }
}

TEST_CASE("minimum is a stationary stable point near zero", "[potential]") {
  Potential p{0.046, 0.33 * two_pi};
  double m = p.minimum();
  REQUIRE(std::abs(m) < 1.0);
  REQUIRE(std::abs(p.derivative(m, 1)) < 1e-12);
  REQUIRE(p.derivative(m, 2) > 0);
  // flux-reversal mirror symmetry: phi_ext -> -phi_ext flips the minimum
  Potential q{0.046, -0.33 * two_pi};
  REQUIRE_THAT(q.minimum(), Catch::Matchers::WithinAbs(-m, 1e-10));
  // unbiased symmetric point
  Potential r{0.046, 0.0};
  REQUIRE_THAT(r.minimum(), Catch::Matchers::WithinAbs(0.0, 1e-10));
}

TEST_CASE("harmonic frame identities", "[potential]") {
  auto tf = taylor_coefficients(ghz(272.436), mhz(107.8), 0.046, 0.33 * two_pi);
  REQUIRE_THAT(tf.phi_zpf * tf.n_zpf, Catch::Matchers::WithinAbs(0.5, 1e-14));
  REQUIRE_THAT(tf.omega0 * tf.omega0,
               Catch::Matchers::WithinRel(8.0 * mhz(107.8) * ghz(272.436) * tf.c[2], 1e-12));
  // alpha = 0 limit: pure cos(phi/6) well, c2 = 1/6 at phi = 0
  auto t0 = taylor_coefficients(ghz(272.436), mhz(107.8), 0.0, 0.0);
  REQUIRE_THAT(t0.phi_min, Catch::Matchers::WithinAbs(0.0, 1e-10));
  REQUIRE_THAT(t0.c[2], Catch::Matchers::WithinRel(1.0 / 6.0, 1e-10));
  REQUIRE_THAT(t0.c[3], Catch::Matchers::WithinAbs(0.0, 1e-10));
}

TEST_CASE("flux-biased frame values for the reference circuit", "[potential]") {
  // frozen from this implementation after cross-checking every c_n against
  // the finite-difference oracle and the minimizer against bisection
  auto tf = taylor_coefficients(ghz(272.436), mhz(107.8), 0.046, 0.33 * two_pi);
  REQUIRE_THAT(std::abs(tf.phi_min), Catch::Matchers::WithinAbs(0.257, 2e-3));
  REQUIRE_THAT(to_hz(tf.omega0) * 1e-9, Catch::Matchers::WithinAbs(6.0949, 1e-3));
  REQUIRE_THAT(tf.phi_zpf, Catch::Matchers::WithinAbs(0.26599, 1e-4));
  REQUIRE_THAT(to_hz(tf.g[3]) * 1e-6, Catch::Matchers::WithinAbs(-24.39, 0.1));
  REQUIRE_THAT(to_hz(tf.g[4]) * 1e-6, Catch::Matchers::WithinAbs(-0.5736, 0.01));
  REQUIRE(tf.c[2] > 0.15);
  REQUIRE(tf.c[2] < 0.17);
}

TEST_CASE("rejects unstable or invalid frames", "[potential]") {
  REQUIRE_THROWS_AS(taylor_coefficients(-1.0, 1.0, 0.046, 0.0), kerrcat::error);
  REQUIRE_THROWS_AS(taylor_coefficients(1.0, -1.0, 0.046, 0.0), kerrcat::error);
}
