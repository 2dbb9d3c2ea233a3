#pragma once
#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "kerrcat/common.hpp"
#include "kerrcat/perturbation/displaced_frame.hpp"

// Closed-form micromotion matrix elements of the charge quadrature
// i(a^dag - a) between approximate Floquet branches, to first order in the
// zero-point phase fluctuation.  The time-dependent element expands as
//   i<phi_mu(t)|(a^dag - a)|phi_nu(t)>
//     = e^{i theta_munu t} sum_n <mu| p_n |nu> e^{i n omega_d t / 2},
// with a finite list of p_n operators and a phase bookkeeping angle theta
// fixed by the lab-frame folding.

namespace kerrcat::perturbation {

// The quadrature harmonics p_n for |n| <= 4; p_0 vanishes identically and
// p_{-n} is the adjoint of p_n.
inline Mat quadrature_harmonic(int n, const DisplacedFrameParams& p, int dim) {
  KC_REQUIRE(dim >= 2, "quadrature_harmonic: bad dimension");
  KC_REQUIRE(std::abs(n) <= 4,
             "quadrature_harmonic: harmonic outside the tabulated range");
  if (n < 0) return Mat(quadrature_harmonic(-n, p, dim).adjoint());
  Mat a = Mat::Zero(dim, dim);
  for (int k = 1; k < dim; ++k) a(k - 1, k) = std::sqrt(double(k));
  const Mat ad = a.adjoint();
  const cplx i1(0, 1);
  const cplx pibar = std::conj(p.Pi);
  switch (n) {
    case 0:
      return Mat::Zero(dim, dim);
    case 1:
      return Mat(i1 * ad + (2.0 * i1 * p.g3 / p.omega_d) * pibar * a);
    case 2:
      return Mat(i1 * (p.omega_0 / p.omega_d) * pibar *
                     Mat::Identity(dim, dim) +
                 (4.0 * i1 * p.g3 / (3.0 * p.omega_0)) * ad * ad);
    case 3:
      return Mat((4.0 * i1 * p.g3 * (p.omega_0 + p.omega_d) /
                  (p.omega_d * (2.0 * p.omega_0 + p.omega_d))) *
                 pibar * ad);
    case 4:
      return Mat(-2.0 * i1 * p.g3 * pibar * pibar * p.omega_0 /
                 (4.0 * p.omega_d * p.omega_d - p.omega_0 * p.omega_0) *
                 Mat::Identity(dim, dim));
    default:
      return Mat::Zero(dim, dim);
  }
}

// theta_munu = (eps_nu - eps_mu)_lab + (eps_mu - eps_nu)_frame; an exact
// multiple of omega_d/2 because folding shifts each energy by such multiples.
inline double theta_munu(const SqueezedKerrSpectrum& sk, int mu, int nu) {
  KC_REQUIRE(mu >= 0 && mu < sk.dim && nu >= 0 && nu < sk.dim,
             "theta_munu: branch out of range");
  const double lab_mu = fold_to_lab(sk.energies(mu), mu % 2, sk.params.omega_d);
  const double lab_nu = fold_to_lab(sk.energies(nu), nu % 2, sk.params.omega_d);
  return (lab_nu - lab_mu) + (sk.energies(mu) - sk.energies(nu));
}

// <phi_mu| p_n |phi_nu> for one harmonic of the expansion.
inline cplx analytic_matrix_element(const SqueezedKerrSpectrum& sk, int mu,
                                    int nu, int n) {
  KC_REQUIRE(mu >= 0 && mu < sk.dim && nu >= 0 && nu < sk.dim,
             "analytic_matrix_element: branch out of range");
  const Mat pn = quadrature_harmonic(n, sk.params, sk.dim);
  return sk.states.col(mu).dot(pn * sk.states.col(nu));
}

// The component of i<phi_mu(t)|(a^dag - a)|phi_nu(t)> oscillating at the
// integer drive harmonic k.  theta + n omega_d/2 must land on k omega_d;
// exactly one expansion harmonic n satisfies this, and harmonics outside the
// tabulated |n| <= 4 contribute zero at this order.
inline cplx analytic_x(const SqueezedKerrSpectrum& sk, int mu, int nu, int k) {
  const double half = 0.5 * sk.params.omega_d;
  const double theta = theta_munu(sk, mu, nu);
  const double j = theta / half;
  const long jr = std::lround(j);
  KC_REQUIRE(std::abs(j - double(jr)) < 1e-6,
             "analytic_x: folding phase is not a half-harmonic");
  const long n = 2L * k - jr;
  if (std::labs(n) > 4) return 0.0;
  return analytic_matrix_element(sk, mu, nu, static_cast<int>(n));
}

}  // namespace kerrcat::perturbation
