#pragma once
#include <array>

#include "kerrcat/circuit/potential.hpp"
#include "kerrcat/common.hpp"
#include "kerrcat/units.hpp"

namespace kerrcat::circuit {

// Capacitance network of the six-junction double-SNAIL loop: per-junction
// plate capacitances, the two small-junction capacitances shunting each
// three-junction stack, shunt + drive-line capacitors across the whole
// device, and ground capacitances on the chain nodes (antenna islands,
// middle island, top node).  All values in farads.
struct CapacitanceSet {
  double C_J_a = 0;        // large-junction capacitance
  double alpha_C_J_a = 0;  // small-junction capacitance
  double C_S = 0;          // shunt
  double C_V = 0;          // drive-line coupling
  double C_g_a = 0;        // ground capacitance of each antenna island
  double C_g_m = 0;        // ground capacitance of the middle island
  double C_g_t = 0;        // ground capacitance of the top node
};

// mode order: [phi, phi_-, xi_1, xi_2, chi_1, chi_2]
struct CapacitanceNetworkResult {
  RMat C_theta;                   // 6x6 junction-flux kinetic matrix, farad
  RMat C_modes;                   // collective-basis capacitance matrix, farad
  RMat C_inv;                     // exact inverse of C_modes, 1/farad
  std::array<double, 6> E_C{};    // per-mode charging energies, rad/s
  std::array<double, 6> E_Jx{};   // per-mode potential curvatures, rad/s
  std::array<double, 6> plasma{}; // sqrt(8 E_C_x E_Jx), rad/s
  RMat g;                         // charge-charge couplings 4e^2 (C^-1)_xy, rad/s
  double beta = 0;                // E_C(phi_-)/E_C(phi)
  std::array<double, 4> beta_mu{};// transverse-mode capacitance ratios
  double phi_min = 0;
};

// Transverse-mode convention: rows orthonormal and orthogonal to (1,1,1).
// This particular member of the family keeps the transverse blocks of the
// inverse capacitance matrix nearly diagonal for ladder-type ground caps and
// fixes the sign/order of the quoted charge-charge couplings.
inline RMat transverse_w() {
  RMat w(2, 3);
  w << 1.0 / std::sqrt(2.0), 0.0, -1.0 / std::sqrt(2.0),
       1.0 / std::sqrt(6.0), -2.0 / std::sqrt(6.0), 1.0 / std::sqrt(6.0);
  return w;
}

inline CapacitanceNetworkResult capacitance_network(
    const CapacitanceSet& cs, double E_J, double phi_ext,
    const RMat& W = transverse_w()) {
  KC_REQUIRE(cs.C_J_a > 0, "capacitance_network: C_J^a must be positive");
  KC_REQUIRE(cs.alpha_C_J_a >= 0 && cs.C_S >= 0 && cs.C_V >= 0 &&
                 cs.C_g_a >= 0 && cs.C_g_m >= 0 && cs.C_g_t >= 0,
             "capacitance_network: capacitances must be non-negative");
  KC_REQUIRE(E_J > 0, "capacitance_network: E_J must be positive");
  KC_REQUIRE(W.rows() == 2 && W.cols() == 3, "capacitance_network: W must be 2x3");
  for (int mu = 0; mu < 2; ++mu) {
    KC_REQUIRE(std::abs(W.row(mu).sum()) < 1e-12,
               "capacitance_network: W rows must sum to zero");
    for (int nu = 0; nu < 2; ++nu) {
      double want = (mu == nu) ? 1.0 : 0.0;
      KC_REQUIRE(std::abs(W.row(mu).dot(W.row(nu)) - want) < 1e-12,
                 "capacitance_network: W rows must be orthonormal");
    }
  }
  const double alpha = cs.alpha_C_J_a / cs.C_J_a;

  CapacitanceNetworkResult out;

  // kinetic matrix in junction fluxes: plate caps on each junction, small
  // junctions across each triplet, shunt + drive cap across the device
  RVec ones = RVec::Ones(6);
  RVec u1 = RVec::Zero(6), u2 = RVec::Zero(6);
  u1.head(3).setOnes();
  u2.tail(3).setOnes();
  RMat C = cs.C_J_a * RMat::Identity(6, 6);
  C += (cs.C_S + cs.C_V) * (ones * ones.transpose());
  C += cs.alpha_C_J_a * (u1 * u1.transpose() + u2 * u2.transpose());

  // ground capacitances: node voltages are cumulative junction-flux sums, so
  // each node cap c_k contributes a constant block over {i,j >= k}; the
  // resulting matrix is the staircase (C_0)_ij = s_min(i,j) with partial sums
  // s of the node-cap sequence (top node, none, 2 antenna, middle, antenna,
  // antenna) down the chain.
  {
    const std::array<double, 6> node = {cs.C_g_t,         0.0, 2.0 * cs.C_g_a,
                                        cs.C_g_m, cs.C_g_a, cs.C_g_a};
    std::array<double, 6> s{};
    double acc = 0;
    for (int k = 0; k < 6; ++k) {
      acc += node[k];
      s[k] = acc;
    }
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) C(i, j) += s[std::min(i, j)];
  }
  out.C_theta = C;

  // change to collective variables theta = M q
  RMat M = RMat::Zero(6, 6);
  M.col(0).setConstant(1.0 / 6.0);
  M.col(1).head(3).setConstant(1.0 / 6.0);
  M.col(1).tail(3).setConstant(-1.0 / 6.0);
  for (int mu = 0; mu < 2; ++mu)
    for (int i = 0; i < 3; ++i) {
      M(i, 2 + mu) = W(mu, i);
      M(3 + i, 4 + mu) = W(mu, i);
    }
  out.C_modes = M.transpose() * C * M;

  Eigen::FullPivLU<RMat> lu(out.C_modes);
  KC_REQUIRE(lu.isInvertible(), "capacitance_network: singular capacitance matrix");
  out.C_inv = lu.inverse();

  // E_C_x = (e^2/2hbar) (C^-1)_xx ; g_xy = 4 e^2/hbar (C^-1)_xy = 8 sqrt(E_C_x E_C_y) style
  out.g = RMat::Zero(6, 6);
  for (int x = 0; x < 6; ++x) {
    out.E_C[x] = e_sq_over_2hbar * out.C_inv(x, x);
    for (int y = 0; y < 6; ++y)
      if (x != y) out.g(x, y) = 8.0 * e_sq_over_2hbar * out.C_inv(x, y);
  }
  out.beta = out.E_C[1] / out.E_C[0];
  for (int k = 0; k < 4; ++k) out.beta_mu[k] = out.E_C[2 + k] / out.E_C[0];

  // potential curvatures at the minimum: both longitudinal modes see the
  // full reduced-potential curvature, each transverse mode sees the array
  // junctions at phase phi_min/6 (the small junctions depend only on the
  // triplet sums, which the W rows annihilate)
  Potential pot{alpha, phi_ext};
  out.phi_min = pot.minimum();
  const double c2 = pot.derivative(out.phi_min, 2);
  const double cj = std::cos(out.phi_min / 6.0);
  out.E_Jx = {E_J * c2, E_J * c2, E_J * cj, E_J * cj, E_J * cj, E_J * cj};
  for (int x = 0; x < 6; ++x)
    out.plasma[x] = std::sqrt(8.0 * out.E_C[x] * out.E_Jx[x]);
  return out;
}

// Dimensionless network specification: everything as a ratio to C_J^a, with
// the absolute scale fixed by the requested symmetric-mode charging energy.
struct CapacitanceRatios {
  double alpha = 0;   // alpha C_J^a / C_J^a
  double r_shunt = 0; // (C_S + C_V)/C_J^a
  double r_ga = 0;    // C_g^a/C_J^a
  double r_gm = 0;    // C_g^m/C_J^a
  double r_gt = 0;    // C_g^t/C_J^a
};

// Solve for the junction capacitance that anchors E_C(phi) = target.
inline CapacitanceSet capacitances_for_charging_energy(
    const CapacitanceRatios& r, double E_C_target,
    const RMat& W = transverse_w()) {
  KC_REQUIRE(E_C_target > 0,
             "capacitances_for_charging_energy: E_C target must be positive");
  CapacitanceSet unit{1.0,   r.alpha, r.r_shunt, 0.0,
                      r.r_ga, r.r_gm,  r.r_gt};
  // E_J, phi_ext irrelevant for the inverse-matrix scale; use placeholders
  auto probe = capacitance_network(unit, 1.0, 0.0, W);
  const double C_J_a = e_sq_over_2hbar * probe.C_inv(0, 0) / E_C_target;
  CapacitanceSet out = unit;
  out.C_J_a = C_J_a;
  out.alpha_C_J_a = r.alpha * C_J_a;
  out.C_S = r.r_shunt * C_J_a;
  out.C_V = 0.0;
  out.C_g_a = r.r_ga * C_J_a;
  out.C_g_m = r.r_gm * C_J_a;
  out.C_g_t = r.r_gt * C_J_a;
  return out;
}

}  // namespace kerrcat::circuit
