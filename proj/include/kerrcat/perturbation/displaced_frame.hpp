#pragma once
#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "kerrcat/common.hpp"
#include "kerrcat/linalg.hpp"

// Second-order effective description of the driven mode in the displaced and
// rotated frame: a squeezed Kerr oscillator whose eigenpairs approximate the
// exact Floquet branches.  All formulas are closed-form in the cubic and
// quartic potential coefficients; this module exists as an independent
// cross-check of the numerically exact propagator route, not as a production
// path.

namespace kerrcat::perturbation {

// Coherent displacement amplitude imprinted on the mode by a charge drive of
// strength eps_d at frequency omega_d (lambda is the drive phase delay).
inline cplx displacement_coefficient(double eps_d, double omega_d,
                                     double omega_0, double phi_zpf,
                                     double lambda = 0.0) {
  KC_REQUIRE(omega_0 > 0 && omega_d > 0, "displacement: bad frequencies");
  KC_REQUIRE(phi_zpf > 0, "displacement: bad zero-point fluctuation");
  KC_REQUIRE(std::abs(omega_0 - omega_d) > 1e-9 * omega_0,
             "displacement: drive on the linear resonance");
  const cplx num = eps_d * omega_d * std::polar(1.0, -lambda);
  return num / (cplx(0, 2.0) * phi_zpf *
                (omega_0 * omega_0 - omega_d * omega_d));
}

struct DisplacedFrameParams {
  double omega_0 = 0;
  double g3 = 0;
  double g4 = 0;
  double omega_d = 0;
  cplx Pi = 0;       // displacement coefficient of the drive
  double detuning = 0;  // second-order shift of the a^dag a coefficient
  double kerr = 0;      // second-order self-Kerr (coefficient of -a^dag2 a^2)
  cplx eps2 = 0;        // two-photon amplitude, g3 * Pi
  // Branch-independent second-order shift every level inherits from the
  // off-resonant drive.  It moves no transition, so the effective Hamiltonian
  // omits it, but absolute lab-zone quasienergies need it back.
  double drive_shift = 0;
};

// Assemble the second-order frame parameters.  Valid while the drive keeps
// the displacement small, |Pi| < 1.
inline DisplacedFrameParams displaced_frame_params(double omega_0, double g3,
                                                   double g4, double phi_zpf,
                                                   double eps_d, double omega_d,
                                                   double lambda = 0.0) {
  DisplacedFrameParams p;
  p.omega_0 = omega_0;
  p.g3 = g3;
  p.g4 = g4;
  p.omega_d = omega_d;
  p.Pi = displacement_coefficient(eps_d, omega_d, omega_0, phi_zpf, lambda);
  KC_REQUIRE(std::abs(p.Pi) < 1.0,
             "displaced_frame_params: displacement amplitude leaves the "
             "validity region |Pi| < 1");
  const double pi2 = std::norm(p.Pi);
  p.detuning = 3.0 * g4 * (1.0 + 2.0 * pi2) -
               4.0 * g3 * g3 *
                   ((5.0 + 6.0 * pi2) / (3.0 * omega_0) +
                    pi2 / (2.0 * omega_0 + omega_d));
  // The cubic contribution carries the same virtual-transition denominators
  // as the undriven oscillator, so at zero displacement the Kerr reduces to
  // the static anharmonicity -3 g4/2 + 10 g3^2/(3 w0).
  p.kerr = -1.5 * g4 + 10.0 * g3 * g3 / (3.0 * omega_0);
  p.eps2 = g3 * p.Pi;
  p.drive_shift = pi2 * omega_0 * (omega_d * omega_d - omega_0 * omega_0) /
                  (2.0 * omega_d * omega_d);
  return p;
}

// (omega_0 - omega_d/2 + Delta) a^dag a - K a^dag2 a^2 + eps2 a^dag2 + h.c.
inline Mat effective_hamiltonian_matrix(const DisplacedFrameParams& p,
                                        int dim) {
  KC_REQUIRE(dim >= 4, "effective_hamiltonian: need at least four levels");
  Mat H = Mat::Zero(dim, dim);
  const double lin = p.omega_0 - 0.5 * p.omega_d + p.detuning;
  for (int n = 0; n < dim; ++n)
    H(n, n) = lin * n - p.kerr * double(n) * double(n - 1);
  for (int n = 0; n + 2 < dim; ++n) {
    const double s = std::sqrt(double(n + 1) * double(n + 2));
    H(n + 2, n) += p.eps2 * s;
    H(n, n + 2) += std::conj(p.eps2) * s;
  }
  return H;
}

// Eigenpairs of the effective Hamiltonian, labeled like the exact Floquet
// branches: photon parity is conserved, so each sector is diagonalized
// separately and branches are interleaved top-down (the cat doublet sits at
// the top of the inverted Kerr ladder).  Branch 2j is the j-th even state,
// branch 2j+1 the j-th odd one.
struct SqueezedKerrSpectrum {
  DisplacedFrameParams params;
  int dim = 0;
  RVec energies;  // descending within each parity class, interleaved
  Mat states;     // column mu, Fock basis
};

inline SqueezedKerrSpectrum diagonalize_displaced_frame(
    const DisplacedFrameParams& p, int dim = 60) {
  Mat H = effective_hamiltonian_matrix(p, dim);
  SqueezedKerrSpectrum out;
  out.params = p;
  out.dim = dim;
  out.energies.resize(dim);
  out.states = Mat::Zero(dim, dim);
  for (int parity = 0; parity < 2; ++parity) {
    const int ns = (dim - parity + 1) / 2;
    Mat Hs(ns, ns);
    for (int i = 0; i < ns; ++i)
      for (int j = 0; j < ns; ++j) Hs(i, j) = H(2 * i + parity, 2 * j + parity);
    auto eg = eig_herm(Hs);  // ascending
    for (int j = 0; j < ns; ++j) {
      const int mu = 2 * j + parity;
      const int src = ns - 1 - j;  // descending
      out.energies(mu) = eg.values(src);
      for (int i = 0; i < ns; ++i)
        out.states(2 * i + parity, mu) = eg.vectors(i, src);
    }
  }
  return out;
}

namespace detail {
inline double positive_mod(double x, double m) {
  double r = std::fmod(x, m);
  if (r < 0) r += m;
  if (r >= m) r -= m;  // guard the r == m rounding edge
  return r;
}
}  // namespace detail

// Fold an unbounded frame eigenvalue into the lab-frame quasienergy zone
// [-omega_d/2, omega_d/2).  Even and odd branches pick up different phases
// from undoing the half-frequency rotation.
inline double fold_to_lab(double eps_d_frame, int parity, double omega_d) {
  KC_REQUIRE(omega_d > 0, "fold_to_lab: bad drive frequency");
  KC_REQUIRE(parity == 0 || parity == 1, "fold_to_lab: parity must be 0 or 1");
  if (parity == 0)
    return detail::positive_mod(eps_d_frame + 0.5 * omega_d, omega_d) -
           0.5 * omega_d;
  return detail::positive_mod(eps_d_frame, 0.5 * omega_d) - 0.5 * omega_d;
}

inline RVec lab_quasienergies(const SqueezedKerrSpectrum& sk) {
  RVec out(sk.dim);
  for (int mu = 0; mu < sk.dim; ++mu)
    out(mu) = fold_to_lab(sk.energies(mu) + sk.params.drive_shift, mu % 2,
                          sk.params.omega_d);
  return out;
}

}  // namespace kerrcat::perturbation
