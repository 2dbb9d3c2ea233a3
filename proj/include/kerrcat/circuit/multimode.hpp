#pragma once
#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstddef>
#include <iostream>
#include <vector>

#include "kerrcat/circuit/fock.hpp"
#include "kerrcat/circuit/potential.hpp"
#include "kerrcat/circuit/single_mode.hpp"
#include "kerrcat/circuit/types.hpp"
#include "kerrcat/linalg.hpp"

namespace kerrcat::circuit {

namespace detail {

// Accumulate coeff * (A kron B) into H.  Product index convention throughout
// this file: |p, s> lives at row p * dim_s + s.
template <typename MatT>
inline void add_kron(MatT& H, typename MatT::Scalar coeff, const MatT& A,
                     const MatT& B) {
  const Eigen::Index rB = B.rows(), cB = B.cols();
  KC_REQUIRE(H.rows() == A.rows() * rB && H.cols() == A.cols() * cB,
             "add_kron: output dimension mismatch");
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      const typename MatT::Scalar w = coeff * A(i, j);
      if (w != typename MatT::Scalar(0)) H.block(i * rB, j * cB, rB, cB) += w * B;
    }
}

// <S| A kron B |S> without forming the product operator: each column of S is
// reshaped to a dim_s x dim_p matrix M, on which (A kron B) acts as B M A^T.
template <typename MatT>
inline MatT rotate_kron(const MatT& S, Eigen::Index dim_p, Eigen::Index dim_s,
                        const MatT& A, const MatT& B) {
  KC_REQUIRE(S.rows() == dim_p * dim_s, "rotate_kron: dimension mismatch");
  KC_REQUIRE(A.rows() == dim_p && A.cols() == dim_p, "rotate_kron: bad primary op");
  KC_REQUIRE(B.rows() == dim_s && B.cols() == dim_s, "rotate_kron: bad secondary op");
  const Eigen::Index r = S.cols();
  MatT T(S.rows(), r);
  for (Eigen::Index l = 0; l < r; ++l) {
    Eigen::Map<const MatT> Ml(S.col(l).data(), dim_s, dim_p);
    Eigen::Map<MatT>(T.col(l).data(), dim_s, dim_p) = B * Ml * A.transpose();
  }
  return S.adjoint() * T;
}

struct LabelReport {
  std::vector<std::array<int, 2>> labels;  // per eigenvector column of V
  int n_ties = 0;            // assignments whose runner-up was within tie_tol
  double min_top_weight = 1.0;  // smallest winning overlap probability
};

// Assign (primary level, secondary excitation) labels to the columns of V.
// The j = 0 rung is claimed by overlap with anchor_i (x) |0>; rung j + 1 is
// claimed by applying the secondary raising operator to the dressed state
// labelled (i, j) and taking the best-overlap unclaimed eigenvector.  Ties
// within tie_tol of the winner are counted and resolved toward the larger
// overlap (lower eigenvector index when exactly equal).
template <typename MatT>
inline LabelReport label_dressed(const MatT& V, const MatT& anchors, int dim_s,
                                 double tie_tol = 0.05) {
  using Scalar = typename MatT::Scalar;
  using VecT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index dim = V.rows();
  const Eigen::Index dim_p = anchors.rows();
  const Eigen::Index n_anchor = anchors.cols();
  KC_REQUIRE(V.cols() == dim, "label_dressed: need the full eigenbasis");
  KC_REQUIRE(dim == dim_p * dim_s, "label_dressed: dimension mismatch");
  KC_REQUIRE(n_anchor * dim_s <= dim, "label_dressed: too many anchors");

  LabelReport rep;
  rep.labels.assign(static_cast<size_t>(dim), {-1, -1});
  std::vector<char> claimed(static_cast<size_t>(dim), 0);
  std::vector<Eigen::Index> owner(static_cast<size_t>(n_anchor) * dim_s, -1);
  const MatT bdag = fock_a(dim_s).transpose().template cast<Scalar>();

  MatT cand = MatT::Zero(dim, n_anchor);
  for (int j = 0; j < dim_s; ++j) {
    if (j == 0) {
      for (Eigen::Index i = 0; i < n_anchor; ++i)
        for (Eigen::Index p = 0; p < dim_p; ++p)
          cand(p * dim_s, i) = anchors(p, i);
    } else {
      for (Eigen::Index i = 0; i < n_anchor; ++i) {
        const Eigen::Index prev = owner[static_cast<size_t>(i) * dim_s + j - 1];
        Eigen::Map<const MatT> Mv(V.col(prev).data(), dim_s, dim_p);
        MatT lifted = bdag * Mv;
        double nrm = lifted.norm();
        if (nrm < 1e-12) {  // raising operator truncated away; restart bare
          lifted.setZero();
          lifted.row(j) = anchors.col(i).transpose();
          nrm = lifted.norm();
        }
        cand.col(i) = Eigen::Map<const VecT>(lifted.data(), dim) / nrm;
      }
    }
    const MatT W = V.adjoint() * cand;
    for (Eigen::Index i = 0; i < n_anchor; ++i) {
      Eigen::Index best = -1;
      double pb = -1.0, ps = -1.0;
      for (Eigen::Index mu = 0; mu < dim; ++mu) {
        if (claimed[static_cast<size_t>(mu)]) continue;
        const double p = std::norm(static_cast<cplx>(W(mu, i)));
        if (p > pb) {
          ps = pb;
          best = mu;
          pb = p;
        } else if (p > ps) {
          ps = p;
        }
      }
      KC_REQUIRE(best >= 0, "label_dressed: ran out of eigenvectors");
      if (ps > pb - tie_tol) ++rep.n_ties;
      claimed[static_cast<size_t>(best)] = 1;
      owner[static_cast<size_t>(i) * dim_s + j] = best;
      rep.labels[static_cast<size_t>(best)] = {static_cast<int>(i), j};
      rep.min_top_weight = std::min(rep.min_top_weight, pb);
    }
  }
  return rep;
}

// Indices (ascending in energy) retained by the label filter plus the
// optional cap on the total count.
inline std::vector<int> select_retained(const LabelReport& rep, int keep_p,
                                        int keep_s, int keep_total) {
  std::vector<int> sel;
  for (int mu = 0; mu < static_cast<int>(rep.labels.size()); ++mu) {
    const auto& l = rep.labels[static_cast<size_t>(mu)];
    if (l[0] >= 0 && l[0] < keep_p && l[1] < keep_s) sel.push_back(mu);
  }
  if (keep_total > 0 && static_cast<int>(sel.size()) > keep_total)
    sel.resize(static_cast<size_t>(keep_total));
  KC_REQUIRE(!sel.empty(), "multimode build: retention filter kept no levels");
  return sel;
}

inline void warn_ties(const char* who, const LabelReport& rep) {
  if (rep.n_ties > 0)
    std::cerr << who << ": " << rep.n_ties
              << " dressed-state label(s) had a runner-up within the tie "
                 "tolerance; kept the larger overlap\n";
}

}  // namespace detail

// SNAIL mode coupled to a readout buffer through the charge operator:
//   H = H_s + omega_b b^dag b + i g_b n (b^dag - b).
// The SNAIL factor enters through its retained single-mode eigenbasis
// (hc.n_keep levels); the joint spectrum keeps secondary excitations below
// hc.keep_secondary.
inline SpectralData build_buffer_coupled(const CircuitSpec& spec,
                                         const HilbertConfig& hc) {
  spec.validate();
  hc.validate();
  KC_REQUIRE(spec.scenario == Scenario::buffer,
             "build_buffer_coupled: wrong scenario");

  CircuitSpec snail = spec;
  snail.scenario = Scenario::single_mode;
  const SpectralData sm = build_single_mode(snail, hc);

  const int dp = sm.dim();
  const int ds = hc.n_secondary;
  const Eigen::Index dim = static_cast<Eigen::Index>(dp) * ds;

  const RMat b = fock_a(ds);
  const Mat chi = (I * (b.transpose() - b).cast<cplx>()).eval();  // i(b^dag - b)
  const Mat numb = (b.transpose() * b).cast<cplx>().eval();
  const Mat Ip = Mat::Identity(dp, dp);
  const Mat Is = Mat::Identity(ds, ds);

  Mat H = Mat::Zero(dim, dim);
  const Mat Ediag = sm.energies.cast<cplx>().asDiagonal();
  detail::add_kron<Mat>(H, 1.0, Ediag, Is);
  detail::add_kron<Mat>(H, spec.omega_b, Ip, numb);
  detail::add_kron<Mat>(H, spec.g_b, sm.n_op, chi);

  const EigHerm es = eig_herm(std::move(H));
  const auto rep = detail::label_dressed<Mat>(es.vectors, Ip, ds);
  detail::warn_ties("build_buffer_coupled", rep);

  const auto sel =
      detail::select_retained(rep, hc.n_keep, hc.keep_secondary, hc.n_keep_total);
  const int r = static_cast<int>(sel.size());
  Mat S(dim, r);
  SpectralData out;
  out.energies.resize(r);
  out.labels.resize(static_cast<size_t>(r));
  for (int k = 0; k < r; ++k) {
    S.col(k) = es.vectors.col(sel[static_cast<size_t>(k)]);
    out.energies(k) = es.values(sel[static_cast<size_t>(k)]);
    out.labels[static_cast<size_t>(k)] = rep.labels[static_cast<size_t>(sel[static_cast<size_t>(k)])];
  }

  out.scenario = Scenario::buffer;
  out.basis = hc.basis;
  out.phi_min = sm.phi_min;
  out.omega0 = sm.omega0;
  out.phi_zpf = sm.phi_zpf;
  out.n_zpf = sm.n_zpf;
  out.omega_secondary = spec.omega_b;
  out.states = S;
  out.n_op = detail::rotate_kron<Mat>(S, dp, ds, sm.n_op, Is);
  if (sm.phi_op.size() > 0)
    out.phi_op = detail::rotate_kron<Mat>(S, dp, ds, sm.phi_op, Is);
  if (sm.a_op.size() > 0)
    out.a_op = detail::rotate_kron<Mat>(S, dp, ds, sm.a_op, Is);
  if (sm.num_op.size() > 0)
    out.num_op = detail::rotate_kron<Mat>(S, dp, ds, sm.num_op, Is);
  out.sec_charge_op = detail::rotate_kron<Mat>(S, dp, ds, Ip, chi);
  out.sec_num_op = detail::rotate_kron<Mat>(S, dp, ds, Ip, numb);
  out.snail_states = sm.states;
  out.n_snail_keep = dp;
  out.n_secondary = ds;
  return out;
}

// SNAIL symmetric mode coupled to the antisymmetric mode of the junction
// array:
//   H = 4 E_C n^2 + 4 beta E_C n_m^2 + g_a n n_m
//       - 6 E_J cos(phi/6) cos(phi_m/6)
//       - 2 alpha E_J cos(phi/2 + phi_ext) cos(phi_m/2).
// The antisymmetric mode is expanded about phi_m = 0 in the harmonic frame
// set by its own junction curvature E_J c2 and charging energy beta E_C.
inline SpectralData build_array_mode(const CircuitSpec& spec,
                                     const HilbertConfig& hc) {
  spec.validate();
  hc.validate();
  KC_REQUIRE(spec.scenario == Scenario::array_mode,
             "build_array_mode: wrong scenario");
  KC_REQUIRE(hc.basis == Basis::fock,
             "build_array_mode: Fock construction only");

  const auto tf =
      taylor_coefficients(spec.E_J, spec.E_C, spec.alpha, spec.phi_ext);
  const double E_J_m = spec.E_J * tf.c[2];
  const double E_C_m = spec.beta_ratio * spec.E_C;
  const double omega_m = std::sqrt(8.0 * E_C_m * E_J_m);
  const double zpf_m = std::pow(2.0 * E_C_m / E_J_m, 0.25);
  const double nzpf_m = 0.5 / zpf_m;

  const int np = hc.n_fock;
  const int ns = hc.n_secondary;
  const Eigen::Index dim = static_cast<Eigen::Index>(np) * ns;

  const RMat a = fock_a(np);
  const XEig xp = fock_x_eig(np + hc.quadrature_margin);
  const RMat c6 =
      op_cos(xp, tf.phi_min / 6.0, tf.phi_zpf / 6.0).topLeftCorner(np, np);
  const RMat c2x = op_cos(xp, 0.5 * tf.phi_min + spec.phi_ext, 0.5 * tf.phi_zpf)
                       .topLeftCorner(np, np);
  const RMat ada = a.transpose() - a;
  const RMat n2 = -(tf.n_zpf * tf.n_zpf) * (ada * ada);

  const RMat am = fock_a(ns);
  const XEig xm = fock_x_eig(ns + hc.quadrature_margin);
  const RMat mc6 = op_cos(xm, 0.0, zpf_m / 6.0).topLeftCorner(ns, ns);
  const RMat mc2 = op_cos(xm, 0.0, 0.5 * zpf_m).topLeftCorner(ns, ns);
  const RMat mada = am.transpose() - am;
  const RMat mn2 = -(nzpf_m * nzpf_m) * (mada * mada);
  const RMat Ipr = RMat::Identity(np, np);
  const RMat Isr = RMat::Identity(ns, ns);

  RMat H = RMat::Zero(dim, dim);
  detail::add_kron<RMat>(H, 4.0 * spec.E_C, n2, Isr);
  detail::add_kron<RMat>(H, 4.0 * E_C_m, Ipr, mn2);
  detail::add_kron<RMat>(H, -6.0 * spec.E_J, c6, mc6);
  detail::add_kron<RMat>(H, -2.0 * spec.alpha * spec.E_J, c2x, mc2);
  // g_a n n_m with n = i n_zpf (a^dag - a) on both factors
  detail::add_kron<RMat>(H, -spec.g_a * tf.n_zpf * nzpf_m, ada, mada);

  const EigSymReal es = eig_sym(std::move(H));

  // anchors: the primary problem with the antisymmetric mode pinned at 0
  RMat Hp = 4.0 * spec.E_C * n2 - 6.0 * spec.E_J * c6 -
            2.0 * spec.alpha * spec.E_J * c2x;
  const EigSymReal esp = eig_sym(std::move(Hp));

  const auto rep = detail::label_dressed<RMat>(es.vectors, esp.vectors, ns);
  detail::warn_ties("build_array_mode", rep);

  const auto sel =
      detail::select_retained(rep, hc.n_keep, hc.keep_secondary, hc.n_keep_total);
  const int r = static_cast<int>(sel.size());
  RMat S(dim, r);
  SpectralData out;
  out.energies.resize(r);
  out.labels.resize(static_cast<size_t>(r));
  for (int k = 0; k < r; ++k) {
    S.col(k) = es.vectors.col(sel[static_cast<size_t>(k)]);
    out.energies(k) = es.values(sel[static_cast<size_t>(k)]);
    out.labels[static_cast<size_t>(k)] = rep.labels[static_cast<size_t>(sel[static_cast<size_t>(k)])];
  }

  out.scenario = Scenario::array_mode;
  out.basis = hc.basis;
  out.phi_min = tf.phi_min;
  out.omega0 = tf.omega0;
  out.phi_zpf = tf.phi_zpf;
  out.n_zpf = tf.n_zpf;
  out.omega_secondary = omega_m;
  out.phi_zpf_secondary = zpf_m;
  out.states = S.cast<cplx>();
  out.n_op =
      (I * tf.n_zpf) * detail::rotate_kron<RMat>(S, np, ns, ada, Isr).cast<cplx>();
  const RMat x = a + a.transpose();
  out.phi_op = (tf.phi_min * RMat::Identity(r, r) +
                tf.phi_zpf * detail::rotate_kron<RMat>(S, np, ns, x, Isr))
                   .cast<cplx>();
  out.a_op = detail::rotate_kron<RMat>(S, np, ns, a, Isr).cast<cplx>();
  const RMat num = a.transpose() * a;
  out.num_op = detail::rotate_kron<RMat>(S, np, ns, num, Isr).cast<cplx>();
  out.sec_charge_op =
      (I * nzpf_m) * detail::rotate_kron<RMat>(S, np, ns, Ipr, mada).cast<cplx>();
  const RMat mnum = am.transpose() * am;
  out.sec_num_op = detail::rotate_kron<RMat>(S, np, ns, Ipr, mnum).cast<cplx>();
  out.snail_states = esp.vectors.cast<cplx>();
  out.n_snail_keep = np;
  out.n_secondary = ns;
  return out;
}

// SNAIL shunted through a stray series inductance: the junction phase is
// phi - phi_l where phi_l = sqrt(omega_l / 2 E_L) (a_l + a_l^dag),
//   H = 4 E_C n^2 + U(phi - phi_l) + omega_l a_l^dag a_l,
// and the two-argument cosines split exactly over the commuting modes.
inline SpectralData build_inductance(const CircuitSpec& spec,
                                     const HilbertConfig& hc) {
  spec.validate();
  hc.validate();
  KC_REQUIRE(spec.scenario == Scenario::inductance,
             "build_inductance: wrong scenario");
  KC_REQUIRE(hc.basis == Basis::fock, "build_inductance: Fock construction only");

  const auto tf =
      taylor_coefficients(spec.E_J, spec.E_C, spec.alpha, spec.phi_ext);
  const double zl = std::sqrt(spec.omega_l / (2.0 * spec.E_L));

  const int np = hc.n_fock;
  const int ns = hc.n_secondary;
  const Eigen::Index dim = static_cast<Eigen::Index>(np) * ns;

  const RMat a = fock_a(np);
  const XEig xp = fock_x_eig(np + hc.quadrature_margin);
  const double off6 = tf.phi_min / 6.0, scl6 = tf.phi_zpf / 6.0;
  const double off2 = 0.5 * tf.phi_min + spec.phi_ext, scl2 = 0.5 * tf.phi_zpf;
  const RMat c6 = op_cos(xp, off6, scl6).topLeftCorner(np, np);
  const RMat s6 = op_sin(xp, off6, scl6).topLeftCorner(np, np);
  const RMat c2x = op_cos(xp, off2, scl2).topLeftCorner(np, np);
  const RMat s2x = op_sin(xp, off2, scl2).topLeftCorner(np, np);
  const RMat ada = a.transpose() - a;
  const RMat n2 = -(tf.n_zpf * tf.n_zpf) * (ada * ada);

  const RMat al = fock_a(ns);
  const XEig xl = fock_x_eig(ns + hc.quadrature_margin);
  const RMat lc6 = op_cos(xl, 0.0, zl / 6.0).topLeftCorner(ns, ns);
  const RMat ls6 = op_sin(xl, 0.0, zl / 6.0).topLeftCorner(ns, ns);
  const RMat lc2 = op_cos(xl, 0.0, 0.5 * zl).topLeftCorner(ns, ns);
  const RMat ls2 = op_sin(xl, 0.0, 0.5 * zl).topLeftCorner(ns, ns);
  const RMat lnum = al.transpose() * al;
  const RMat lada = al.transpose() - al;
  const RMat Ipr = RMat::Identity(np, np);
  const RMat Isr = RMat::Identity(ns, ns);

  // cos((phi - phi_l)/6) = cos(phi/6) cos(phi_l/6) + sin(phi/6) sin(phi_l/6),
  // and likewise with the offset phi/2 + phi_ext term.
  RMat H = RMat::Zero(dim, dim);
  detail::add_kron<RMat>(H, 4.0 * spec.E_C, n2, Isr);
  detail::add_kron<RMat>(H, spec.omega_l, Ipr, lnum);
  detail::add_kron<RMat>(H, -6.0 * spec.E_J, c6, lc6);
  detail::add_kron<RMat>(H, -6.0 * spec.E_J, s6, ls6);
  detail::add_kron<RMat>(H, -2.0 * spec.alpha * spec.E_J, c2x, lc2);
  detail::add_kron<RMat>(H, -2.0 * spec.alpha * spec.E_J, s2x, ls2);

  const EigSymReal es = eig_sym(std::move(H));

  // anchors: the loop mode pinned at phi_l = 0
  RMat Hp = 4.0 * spec.E_C * n2 - 6.0 * spec.E_J * c6 -
            2.0 * spec.alpha * spec.E_J * c2x;
  const EigSymReal esp = eig_sym(std::move(Hp));

  const auto rep = detail::label_dressed<RMat>(es.vectors, esp.vectors, ns);
  detail::warn_ties("build_inductance", rep);

  const auto sel =
      detail::select_retained(rep, hc.n_keep, hc.keep_secondary, hc.n_keep_total);
  const int r = static_cast<int>(sel.size());
  RMat S(dim, r);
  SpectralData out;
  out.energies.resize(r);
  out.labels.resize(static_cast<size_t>(r));
  for (int k = 0; k < r; ++k) {
    S.col(k) = es.vectors.col(sel[static_cast<size_t>(k)]);
    out.energies(k) = es.values(sel[static_cast<size_t>(k)]);
    out.labels[static_cast<size_t>(k)] = rep.labels[static_cast<size_t>(sel[static_cast<size_t>(k)])];
  }

  out.scenario = Scenario::inductance;
  out.basis = hc.basis;
  out.phi_min = tf.phi_min;
  out.omega0 = tf.omega0;
  out.phi_zpf = tf.phi_zpf;
  out.n_zpf = tf.n_zpf;
  out.omega_secondary = spec.omega_l;
  out.phi_zpf_secondary = zl;
  out.states = S.cast<cplx>();
  out.n_op =
      (I * tf.n_zpf) * detail::rotate_kron<RMat>(S, np, ns, ada, Isr).cast<cplx>();
  const RMat x = a + a.transpose();
  out.phi_op = (tf.phi_min * RMat::Identity(r, r) +
                tf.phi_zpf * detail::rotate_kron<RMat>(S, np, ns, x, Isr))
                   .cast<cplx>();
  out.a_op = detail::rotate_kron<RMat>(S, np, ns, a, Isr).cast<cplx>();
  const RMat num = a.transpose() * a;
  out.num_op = detail::rotate_kron<RMat>(S, np, ns, num, Isr).cast<cplx>();
  out.sec_charge_op = (I * 0.5 / zl) *
                      detail::rotate_kron<RMat>(S, np, ns, Ipr, lada).cast<cplx>();
  out.sec_num_op = detail::rotate_kron<RMat>(S, np, ns, Ipr, lnum).cast<cplx>();
  out.snail_states = esp.vectors.cast<cplx>();
  out.n_snail_keep = np;
  out.n_secondary = ns;
  return out;
}

}  // namespace kerrcat::circuit
