#pragma once
#include <cmath>
#include <complex>

#include "kerrcat/common.hpp"
#include "kerrcat/lindblad/transitions.hpp"

namespace kerrcat::observables {

namespace detail {
// int_0^t e^{i x t'} dt', stable through the resonance
inline cplx phase_integral(double x, double t) {
  if (std::abs(x * t) < 1e-8) return cplx(t, 0.5 * x * t * t);
  return (std::exp(cplx(0, x * t)) - 1.0) / cplx(0, x);
}
}  // namespace detail

// First-order transfer amplitude |<phi_mu(t)|psi(t)>| for a weak cosine
// probe zeta cos(omega_s t) B applied to the equal superposition of branches
// 0 and 1, where X holds the Fourier matrix elements of B in the Floquet
// basis.  Peaks when omega_s hits a transition frequency
// quasi_mu - quasi_nu + k omega_d.
inline double probe_transition_amplitude(const lindblad::XTensor& X,
                                         const RVec& quasi, double omega_d,
                                         int mu, double omega_s, double zeta,
                                         double t) {
  KC_REQUIRE(!X.coeff.empty(), "probe_transition_amplitude: empty tensor");
  const auto nb = X.coeff.front().rows();
  KC_REQUIRE(quasi.size() == nb,
             "probe_transition_amplitude: quasienergy count mismatch");
  KC_REQUIRE(mu >= 0 && mu < nb, "probe_transition_amplitude: branch out of range");
  KC_REQUIRE(nb >= 2, "probe_transition_amplitude: need branches 0 and 1");
  KC_REQUIRE(omega_s > 0 && t >= 0 && zeta >= 0,
             "probe_transition_amplitude: bad probe parameters");

  cplx acc = 0;
  for (int nu = 0; nu <= 1; ++nu)
    for (int k = -X.k_max; k <= X.k_max; ++k) {
      const cplx x = X.at(k)(mu, nu);
      if (x == cplx(0, 0)) continue;
      const double delta = quasi(mu) - quasi(nu) + k * omega_d;
      acc += x * 0.5 *
             (detail::phase_integral(delta + omega_s, t) +
              detail::phase_integral(delta - omega_s, t));
    }
  return zeta / std::sqrt(2.0) * std::abs(acc);
}

}  // namespace kerrcat::observables
