#pragma once
#include <Eigen/Dense>
#include <cmath>

#include "kerrcat/circuit/types.hpp"
#include "kerrcat/common.hpp"
#include "kerrcat/observables/phase_space.hpp"

namespace kerrcat::observables {

// Rotate a density matrix from the retained eigenbasis into the plain Fock
// basis of the main mode, tracing out the auxiliary mode when present.
inline Mat to_fock_density(const Mat& rho, const circuit::SpectralData& sd) {
  KC_REQUIRE(sd.basis == circuit::Basis::fock,
             "to_fock_density: charge-basis builds have no Fock map");
  KC_REQUIRE(rho.rows() == rho.cols() && rho.rows() == sd.states.cols(),
             "to_fock_density: dimension mismatch with the retained basis");
  Mat full = sd.states * rho * sd.states.adjoint();
  if (sd.n_secondary <= 1) return full;
  // product rows are p * n_secondary + s; trace over s
  const int ds = sd.n_secondary;
  const int dp = static_cast<int>(full.rows()) / ds;
  Mat reduced = Mat::Zero(dp, dp);
  for (int p = 0; p < dp; ++p)
    for (int q = 0; q < dp; ++q)
      for (int s = 0; s < ds; ++s) reduced(p, q) += full(p * ds + s, q * ds + s);
  KC_REQUIRE(sd.snail_states.cols() == dp,
             "to_fock_density: missing single-mode eigenvectors");
  return sd.snail_states * reduced * sd.snail_states.adjoint();
}

inline Mat to_fock_density(const Vec& state, const circuit::SpectralData& sd) {
  return to_fock_density(Mat(state * state.adjoint()), sd);
}

// The two computational wells spanned by a branch pair: superpositions
// (phi0 +- e^{i theta} phi1)/sqrt(2) with the relative phase chosen to pull
// the two <a> expectations maximally apart.
struct WellStates {
  Vec plus, minus;   // same basis as the input modes
  cplx beta = 0;     // common displacement, (<a>_+ + <a>_-)/2
  cplx alpha = 0;    // well separation,     (<a>_+ - <a>_-)/2
  double theta = 0;  // optimized relative phase
  bool degenerate = false;  // wells closer than the vacuum scale
};

inline WellStates well_states(const Vec& phi0, const Vec& phi1,
                              const Mat& a_op) {
  KC_REQUIRE(phi0.size() == phi1.size() && phi0.size() == a_op.rows() &&
                 a_op.rows() == a_op.cols(),
             "well_states: dimension mismatch");
  KC_REQUIRE(std::abs(phi0.norm() - 1.0) < 1e-8 &&
                 std::abs(phi1.norm() - 1.0) < 1e-8,
             "well_states: modes must be normalized");
  KC_REQUIRE(std::abs(phi0.dot(phi1)) < 1e-8,
             "well_states: modes must be orthogonal");

  const cplx a00 = phi0.dot(a_op * phi0);
  const cplx a11 = phi1.dot(a_op * phi1);
  const cplx a01 = phi0.dot(a_op * phi1);
  const cplx a10 = phi1.dot(a_op * phi0);

  // <a>_+ - <a>_- = e^{i t} a01 + e^{-i t} a10, maximal in modulus at
  // 2 t = arg(a10) - arg(a01) where it reaches |a01| + |a10|
  WellStates w;
  w.theta = 0.5 * (std::arg(a10) - std::arg(a01));
  w.beta = 0.5 * (a00 + a11);
  cplx sep = std::polar(1.0, w.theta) * a01 + std::polar(1.0, -w.theta) * a10;
  // two optima theta, theta + pi differ by a well swap; canonicalize so the
  // separation points into the right half-plane
  if (sep.real() < 0 || (sep.real() == 0 && sep.imag() < 0)) {
    w.theta += M_PI;
    sep = -sep;
  }
  w.alpha = 0.5 * sep;
  const cplx ph = std::polar(1.0, w.theta);
  w.plus = (phi0 + ph * phi1) / std::sqrt(2.0);
  w.minus = (phi0 - ph * phi1) / std::sqrt(2.0);
  w.degenerate = std::abs(w.alpha) < 1.0;  // separation under two vacuum sigmas
  return w;
}

// Idealized logical X: projector difference of coherent states at the two
// extracted well centers, in the Fock basis.
inline Mat logical_x_op(const WellStates& w, int dim) {
  const Vec cp = coherent_vector(w.beta + w.alpha, dim);
  const Vec cm = coherent_vector(w.beta - w.alpha, dim);
  return cp * cp.adjoint() - cm * cm.adjoint();
}

struct WellLeakage {
  double plus = 0, minus = 0;          // p_halfplane - p_coherent per well
  double half_plus = 0, half_minus = 0;
  double coh_plus = 0, coh_minus = 0;
  bool degenerate = false;
};

// Population that sits in each well's half-plane but not in the idealized
// coherent state at its center.  rho must be in the Fock basis.
inline WellLeakage leakage_probability(const Mat& rho, const WellStates& w,
                                       const PhaseGrid& grid,
                                       bool warn_coverage = true) {
  const int d = static_cast<int>(rho.rows());
  const cplx cp = w.beta + w.alpha;
  const cplx cm = w.beta - w.alpha;

  WellLeakage out;
  out.degenerate = std::abs(cp - cm) < std::sqrt(2.0);  // two vacuum widths

  const Vec vp = coherent_vector(cp, d);
  const Vec vm = coherent_vector(cm, d);
  out.coh_plus = std::real(vp.dot(rho * vp));
  out.coh_minus = std::real(vm.dot(rho * vm));

  const PhaseField q = husimi(rho, grid, warn_coverage);
  const cplx mid = 0.5 * (cp + cm);
  const cplx sepdir = cp - cm;
  for (int i = 0; i < grid.n_im; ++i)
    for (int j = 0; j < grid.n_re; ++j) {
      const cplx g(grid.re(j), grid.im(i));
      const double side = std::real((g - mid) * std::conj(sepdir));
      const double weight = q.values(i, j) * grid.cell();
      if (side > 0)
        out.half_plus += weight;
      else if (side < 0)
        out.half_minus += weight;
      else {
        out.half_plus += 0.5 * weight;
        out.half_minus += 0.5 * weight;
      }
    }
  out.plus = out.half_plus - out.coh_plus;
  out.minus = out.half_minus - out.coh_minus;
  return out;
}

}  // namespace kerrcat::observables
