#pragma once
#include <Eigen/Dense>
#include <complex>

#define LAPACK_COMPLEX_CUSTOM
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "kerrcat/circuit/fock.hpp"
#include "kerrcat/circuit/potential.hpp"
#include "kerrcat/circuit/types.hpp"

namespace kerrcat::circuit {

namespace detail {

// Fock construction: expand about the well minimum, build the cosines as
// exact trig functions of the truncated position operator.
inline SpectralData build_single_mode_fock(const CircuitSpec& spec,
                                           const HilbertConfig& hc) {
  const auto tf = taylor_coefficients(spec.E_J, spec.E_C, spec.alpha, spec.phi_ext);
  const int n = hc.n_fock;
  const RMat a = fock_a(n);
  const XEig xe = fock_x_eig(n + hc.quadrature_margin);

  const RMat cos_outer =
      op_cos(xe, tf.phi_min / 6.0, tf.phi_zpf / 6.0).topLeftCorner(n, n);
  const RMat cos_inner =
      op_cos(xe, 0.5 * tf.phi_min + spec.phi_ext, 0.5 * tf.phi_zpf)
          .topLeftCorner(n, n);
  const RMat ada = a.transpose() - a;  // (a^dag - a), real antisymmetric
  const RMat n2 = -(tf.n_zpf * tf.n_zpf) * (ada * ada);

  RMat H = 4.0 * spec.E_C * n2 - 6.0 * spec.E_J * cos_outer -
           2.0 * spec.alpha * spec.E_J * cos_inner;

  Eigen::SelfAdjointEigenSolver<RMat> es(H);
  KC_REQUIRE(es.info() == Eigen::Success, "build_single_mode: eigensolver failed");

  SpectralData sd;
  sd.scenario = Scenario::single_mode;
  sd.basis = Basis::fock;
  sd.phi_min = tf.phi_min;
  sd.omega0 = tf.omega0;
  sd.phi_zpf = tf.phi_zpf;
  sd.n_zpf = tf.n_zpf;

  const int keep = hc.n_keep;
  sd.energies = es.eigenvalues().head(keep);
  const RMat S = es.eigenvectors().leftCols(keep);
  sd.states = S.cast<cplx>();

  sd.n_op = (I * tf.n_zpf) * (S.transpose() * ada * S).cast<cplx>();
  RMat x = a + a.transpose();
  sd.phi_op = (tf.phi_min * RMat::Identity(keep, keep) +
               tf.phi_zpf * S.transpose() * x * S).cast<cplx>();
  sd.a_op = (S.transpose() * a * S).cast<cplx>();
  sd.num_op = (S.transpose() * (a.transpose() * a) * S).cast<cplx>();
  sd.labels.resize(keep);
  for (int k = 0; k < keep; ++k) sd.labels[k] = {k, 0};
  return sd;
}

// Charge construction on the 12pi-periodic lattice: charge step 1/6, the two
// cosines act as shifts by 1 and 3 lattice sites.  Banded Hermitian solve.
inline SpectralData build_single_mode_charge(const CircuitSpec& spec,
                                             const HilbertConfig& hc) {
  const int L = 6 * hc.n_charge_max;  // site index j in [-L, L], charge j/6
  const int dim = 2 * L + 1;
  const int kd = 3;
  const int ldab = kd + 1;
  std::vector<cplx> ab(static_cast<size_t>(ldab) * dim, cplx(0, 0));
  const cplx inner = -spec.alpha * spec.E_J *
                     std::exp(I * spec.phi_ext);  // <j+3|H|j>
  for (int j = 0; j < dim; ++j) {
    const double q = (j - L) / 6.0;
    ab[0 + j * ldab] = 4.0 * spec.E_C * q * q;
    if (j + 1 < dim) ab[1 + j * ldab] = -3.0 * spec.E_J;
    if (j + 3 < dim) ab[3 + j * ldab] = inner;
  }

  const int keep = hc.n_keep;
  std::vector<double> w(dim);
  Mat z(dim, keep);
  std::vector<cplx> q(static_cast<size_t>(dim) * dim);
  std::vector<lapack_int> ifail(dim);
  lapack_int m = 0;
  lapack_int info = LAPACKE_zhbevx(
      LAPACK_COL_MAJOR, 'V', 'I', 'L', dim, kd, ab.data(), ldab, q.data(), dim,
      0.0, 0.0, 1, keep, 2.0 * LAPACKE_dlamch('S'), &m, w.data(), z.data(),
      dim, ifail.data());
  KC_REQUIRE(info == 0, "build_single_mode: banded eigensolver failed");
  KC_REQUIRE(m == keep, "build_single_mode: banded solver returned fewer levels");

  const auto tf = taylor_coefficients(spec.E_J, spec.E_C, spec.alpha, spec.phi_ext);
  SpectralData sd;
  sd.scenario = Scenario::single_mode;
  sd.basis = Basis::charge;
  sd.phi_min = tf.phi_min;
  sd.omega0 = tf.omega0;
  sd.phi_zpf = tf.phi_zpf;
  sd.n_zpf = tf.n_zpf;
  sd.energies = Eigen::Map<RVec>(w.data(), keep);
  sd.states = z;

  RVec qdiag(dim);
  for (int j = 0; j < dim; ++j) qdiag(j) = (j - L) / 6.0;
  sd.n_op = z.adjoint() * qdiag.asDiagonal() * z;
  sd.labels.resize(keep);
  for (int k = 0; k < keep; ++k) sd.labels[k] = {k, 0};
  return sd;
}

}  // namespace detail

inline SpectralData build_single_mode(const CircuitSpec& spec,
                                      const HilbertConfig& hc) {
  spec.validate();
  hc.validate();
  KC_REQUIRE(spec.scenario == Scenario::single_mode,
             "build_single_mode: spec is not single-mode");
  return hc.basis == Basis::fock ? detail::build_single_mode_fock(spec, hc)
                                 : detail::build_single_mode_charge(spec, hc);
}

// Cross-validation of the two constructions on the level spacings E_k - E_0.
struct BasisComparison {
  double max_rel_err = 0;
  int argmax_level = 0;
  RVec fock_spacings;
  RVec charge_spacings;
};

inline BasisComparison compare_bases(const CircuitSpec& spec,
                                     const HilbertConfig& hc) {
  HilbertConfig h = hc;
  h.basis = Basis::fock;
  const auto f = build_single_mode(spec, h);
  h.basis = Basis::charge;
  const auto c = build_single_mode(spec, h);

  const int keep = hc.n_keep;
  BasisComparison out;
  out.fock_spacings = f.energies.array() - f.energies(0);
  out.charge_spacings = c.energies.array() - c.energies(0);
  for (int k = 1; k < keep; ++k) {
    double rel = std::abs(out.fock_spacings(k) - out.charge_spacings(k)) /
                 out.charge_spacings(k);
    if (rel > out.max_rel_err) {
      out.max_rel_err = rel;
      out.argmax_level = k;
    }
  }
  return out;
}

}  // namespace kerrcat::circuit
