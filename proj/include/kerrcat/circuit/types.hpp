#pragma once
#include <array>
#include <vector>

#include "kerrcat/common.hpp"

namespace kerrcat::circuit {

enum class Scenario { single_mode, buffer, array_mode, inductance };
enum class Basis { fock, charge };

// All energies/frequencies in rad/s.
struct CircuitSpec {
  Scenario scenario = Scenario::single_mode;
  double E_J = 0;
  double E_C = 0;
  double alpha = 0;
  double phi_ext = 0;

  // buffer scenario: H += omega_b b^dag b + i g_b n (b^dag - b)
  double omega_b = 0;
  double g_b = 0;

  // array scenario: H += 4 beta E_C n_m^2 + g_a n n_m, junction cosines split
  // across the symmetric/antisymmetric pair
  double beta_ratio = 0;
  double g_a = 0;

  // inductance scenario: H = 4 E_C n^2 + U(phi - phi_l) + omega_l a_l^dag a_l
  double E_L = 0;
  double omega_l = 0;

  void validate() const {
    KC_REQUIRE(E_J > 0, "CircuitSpec: E_J must be positive");
    KC_REQUIRE(E_C > 0, "CircuitSpec: E_C must be positive");
    KC_REQUIRE(alpha >= 0 && alpha < 0.5, "CircuitSpec: alpha out of range");
    switch (scenario) {
      case Scenario::single_mode: break;
      case Scenario::buffer:
        KC_REQUIRE(omega_b > 0, "CircuitSpec: buffer needs omega_b > 0");
        break;
      case Scenario::array_mode:
        KC_REQUIRE(beta_ratio > 0, "CircuitSpec: array needs beta_ratio > 0");
        break;
      case Scenario::inductance:
        KC_REQUIRE(E_L > 0 && omega_l > 0, "CircuitSpec: inductance needs E_L, omega_l");
        break;
    }
  }
};

struct HilbertConfig {
  Basis basis = Basis::fock;
  int n_fock = 250;        // Fock states used for diagonalization
  int n_charge_max = 400;  // charge support [-n_max, n_max], lattice step 1/6
  int n_keep = 160;        // retained levels (primary mode, or total if single)
  int n_secondary = 1;     // Fock dimension of the auxiliary mode
  int keep_secondary = 1;  // label filter: secondary excitation < keep_secondary
  int n_keep_total = 0;    // cap on total retained levels, lowest energies first
                           // (0 = no cap; multimode builds only)
  // Trig operators are evaluated in an enlarged X-eigenbasis of dimension
  // n_fock + quadrature_margin and then truncated; without the margin the
  // construction degenerates to a position-grid scheme whose upper retained
  // levels drift at the 1e-2 level (checked against the charge basis).
  int quadrature_margin = 150;

  void validate() const {
    KC_REQUIRE(n_fock >= 4, "HilbertConfig: n_fock too small");
    KC_REQUIRE(n_charge_max >= 4, "HilbertConfig: n_charge_max too small");
    KC_REQUIRE(n_keep >= 2, "HilbertConfig: n_keep must be >= 2");
    KC_REQUIRE(n_keep <= n_fock, "HilbertConfig: n_keep exceeds n_fock");
    KC_REQUIRE(n_secondary >= 1, "HilbertConfig: n_secondary must be >= 1");
    KC_REQUIRE(keep_secondary >= 1 && keep_secondary <= n_secondary,
               "HilbertConfig: keep_secondary out of range");
    KC_REQUIRE(n_keep_total >= 0, "HilbertConfig: n_keep_total must be >= 0");
  }
};

// Retained spectrum + operators rotated into the retained eigenbasis.
struct SpectralData {
  Scenario scenario = Scenario::single_mode;
  Basis basis = Basis::fock;

  // harmonic frame of the SNAIL mode
  double phi_min = 0, omega0 = 0, phi_zpf = 0, n_zpf = 0;

  // harmonic frame of the auxiliary mode (multimode builds; zpf is zero when
  // the mode enters with a fixed frequency instead of a phase variable)
  double omega_secondary = 0, phi_zpf_secondary = 0;

  RVec energies;  // ascending, rad/s
  Mat states;     // construction-basis amplitudes, dim x n_retained
  std::vector<std::array<int, 2>> labels;  // (snail level, secondary excitation)

  // operators in the retained eigenbasis (empty when not constructible)
  Mat n_op;           // SNAIL charge
  Mat phi_op;         // SNAIL phase (Fock-family builds)
  Mat a_op;           // SNAIL annihilation, harmonic frame
  Mat num_op;         // a^dag a
  Mat sec_charge_op;  // auxiliary-mode charge-type operator (multimode builds)
  Mat sec_num_op;     // auxiliary-mode number operator (multimode builds)

  // multimode builds: single-mode eigenvectors used for the product basis
  Mat snail_states;   // n_fock x n_snail_keep
  int n_snail_keep = 0;
  int n_secondary = 1;

  int dim() const { return static_cast<int>(energies.size()); }
};

}  // namespace kerrcat::circuit
