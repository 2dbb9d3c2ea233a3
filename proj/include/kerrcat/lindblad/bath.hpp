#pragma once
#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "kerrcat/common.hpp"
#include "kerrcat/units.hpp"

namespace kerrcat::lindblad {

// One dissipation channel: a coupling operator (in the branch basis the
// dissipators will act on) plus a spectral density.  The density is either
// sampled at drive harmonics m*omega_d/2 -- each with its own effective
// temperature -- or flat (J0, T0) above zero frequency.
struct BathChannel {
  std::string name;
  Mat op;
  std::map<int, double> J_harm;  // m -> J(m*omega_d/2), angular rate
  std::map<int, double> T_harm;  // m -> temperature in kelvin
  bool flat = false;
  double J0 = 0, T0 = 0;

  void validate() const {
    if (flat) {
      KC_REQUIRE(J0 >= 0, "BathChannel: flat J0 must be >= 0");
      KC_REQUIRE(T0 >= 0, "BathChannel: flat T0 must be >= 0");
      return;
    }
    KC_REQUIRE(!J_harm.empty(), "BathChannel: no spectral density given");
    for (const auto& [m, J] : J_harm) {
      KC_REQUIRE(m >= 0, "BathChannel: harmonic index must be >= 0");
      KC_REQUIRE(J >= 0, "BathChannel: J must be >= 0");
      auto it = T_harm.find(m);
      KC_REQUIRE(it != T_harm.end() && it->second >= 0,
                 "BathChannel: every harmonic needs a temperature >= 0");
    }
  }
};

struct BathSpec {
  std::vector<BathChannel> channels;
  double quasideg_threshold = khz(100.0);

  void validate() const {
    KC_REQUIRE(quasideg_threshold > 0, "BathSpec: threshold must be positive");
    KC_REQUIRE(!channels.empty(), "BathSpec: at least one channel required");
    for (const auto& ch : channels) ch.validate();
  }
};

inline double n_thermal(double omega, double T) {
  KC_REQUIRE(omega > 0, "n_thermal: positive frequency required");
  if (T <= 0) return 0.0;
  const double x = hbar_over_kB * omega / T;
  if (x > 700.0) return 0.0;
  return 1.0 / std::expm1(x);
}

// Golden-rule rate at signed transition frequency omega:
//   kappa(w) = n_th(w) J(w) + [1 + n_th(-w)] J(-w),   J(w<0) = 0.
// Positive omega is absorption from the bath, negative is emission into it.
// Harmonic channels snap |omega| to the nearest modeled harmonic and evaluate
// J, T, and the occupation there; a transition farther than omega_d/4 from
// every modeled harmonic is outside the clusters the density describes and is
// an error.  Zero frequency carries no spectral weight under the Heaviside
// convention, so DC classes are silent.
inline double kappa(double omega, const BathChannel& ch, double omega_d) {
  double J, T, w_eval;
  if (ch.flat) {
    if (omega == 0.0) return 0.0;
    J = ch.J0;
    T = ch.T0;
    w_eval = std::abs(omega);
  } else {
    KC_REQUIRE(omega_d > 0, "kappa: omega_d must be positive");
    KC_REQUIRE(!ch.J_harm.empty(), "kappa: channel has no spectral density");
    const double half = 0.5 * omega_d;
    int m_best = -1;
    double d_best = 0;
    for (const auto& [m, Jm] : ch.J_harm) {
      const double d = std::abs(std::abs(omega) - m * half);
      if (m_best < 0 || d < d_best) {
        m_best = m;
        d_best = d;
      }
    }
    KC_REQUIRE(d_best <= 0.25 * omega_d,
               "kappa: transition frequency outside the modeled harmonic "
               "clusters of channel '" +
                   ch.name + "'");
    if (m_best == 0) return 0.0;
    J = ch.J_harm.at(m_best);
    T = ch.T_harm.at(m_best);
    w_eval = m_best * half;
  }
  if (J == 0.0) return 0.0;
  const double nth = n_thermal(w_eval, T);
  return omega > 0 ? nth * J : (1.0 + nth) * J;
}

}  // namespace kerrcat::lindblad
