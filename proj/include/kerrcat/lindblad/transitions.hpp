#pragma once
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "kerrcat/common.hpp"

namespace kerrcat::lindblad {

// Fourier components of a channel operator between Floquet modes:
//   X_{mu,nu,k} = (1/T) \int_0^T e^{-i k w t} <phi_mu(t)| A |phi_nu(t)> dt,
// evaluated as a DFT over the period samples.  coeff[k + k_max](mu, nu).
struct XTensor {
  int k_max = 0;
  std::vector<Mat> coeff;
  const Mat& at(int k) const {
    KC_REQUIRE(std::abs(k) <= k_max, "XTensor: harmonic index out of range");
    return coeff[static_cast<size_t>(k + k_max)];
  }
};

inline XTensor fourier_matrix_elements(const std::vector<Mat>& samples,
                                       const Mat& op, int k_max) {
  KC_REQUIRE(!samples.empty(), "fourier_matrix_elements: no samples");
  const auto N = static_cast<int>(samples.size());
  KC_REQUIRE(k_max >= 0 && N >= 4 * k_max + 4,
             "fourier_matrix_elements: sample rate too low for k_max "
             "(aliasing)");
  const Eigen::Index d = samples[0].rows();
  const Eigen::Index nb = samples[0].cols();
  KC_REQUIRE(op.rows() == d && op.cols() == d,
             "fourier_matrix_elements: operator dimension mismatch");

  XTensor out;
  out.k_max = k_max;
  out.coeff.assign(static_cast<size_t>(2 * k_max + 1), Mat::Zero(nb, nb));
  for (int j = 0; j < N; ++j) {
    Mat Mj = samples[static_cast<size_t>(j)].adjoint() * op *
             samples[static_cast<size_t>(j)];
    for (int k = -k_max; k <= k_max; ++k) {
      const double phi = -2.0 * M_PI * k * j / N;
      out.coeff[static_cast<size_t>(k + k_max)] += (std::exp(I * phi) / double(N)) * Mj;
    }
  }
  return out;
}

struct TransitionEntry {
  int mu = 0, nu = 0, k = 0;
  double delta = 0;     // eps_mu - eps_nu + k * omega_d
  std::vector<cplx> x;  // one Fourier element per channel
};

struct TransitionTable {
  double omega_d = 0;
  double threshold = 0;
  int dim = 0;  // level cut the dissipators act on
  std::vector<TransitionEntry> entries;
  std::vector<std::vector<int>> classes;  // indices into entries
};

// Enumerate transitions (mu, nu, k) below the level cut whose Fourier element
// clears the floor on at least one channel, then partition them into
// quasidegeneracy classes: the transitive closure of |delta - delta'| <
// threshold, built by sorting and chain-merging (exact for a 1-D metric).
// The k-ladder already enumerates every zone shift of a quasienergy
// difference, so the plain difference is the physically correct metric;
// folding the comparison modulo omega_d would merge absorption (+w) with
// emission (-w) classes and break detailed balance.
inline TransitionTable build_transition_table(
    const RVec& quasi, double omega_d, const std::vector<XTensor>& channels,
    double threshold, int level_cut = -1, double element_floor = 1e-8) {
  KC_REQUIRE(omega_d > 0, "build_transition_table: omega_d must be positive");
  KC_REQUIRE(threshold > 0, "build_transition_table: threshold must be positive");
  KC_REQUIRE(!channels.empty(), "build_transition_table: no channels");
  const int nb = static_cast<int>(channels[0].coeff[0].rows());
  for (const auto& ch : channels)
    KC_REQUIRE(ch.coeff[0].rows() == nb && ch.k_max == channels[0].k_max,
               "build_transition_table: channel tensors disagree in shape");
  KC_REQUIRE(quasi.size() >= nb,
             "build_transition_table: quasienergies missing for some branches");
  int cut = level_cut < 0 ? nb : level_cut;
  KC_REQUIRE(cut > 0 && cut <= nb,
             "build_transition_table: level_cut outside the tracked branches");
  const int k_max = channels[0].k_max;

  TransitionTable out;
  out.omega_d = omega_d;
  out.threshold = threshold;
  out.dim = cut;
  for (int mu = 0; mu < cut; ++mu)
    for (int nu = 0; nu < cut; ++nu)
      for (int k = -k_max; k <= k_max; ++k) {
        TransitionEntry e;
        e.mu = mu;
        e.nu = nu;
        e.k = k;
        e.delta = quasi(mu) - quasi(nu) + k * omega_d;
        double biggest = 0;
        for (const auto& ch : channels) {
          e.x.push_back(ch.at(k)(mu, nu));
          biggest = std::max(biggest, std::abs(e.x.back()));
        }
        if (biggest >= element_floor) out.entries.push_back(std::move(e));
      }

  std::vector<int> order(out.entries.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return out.entries[static_cast<size_t>(a)].delta <
           out.entries[static_cast<size_t>(b)].delta;
  });
  for (size_t i = 0; i < order.size(); ++i) {
    const double d = out.entries[static_cast<size_t>(order[i])].delta;
    if (i == 0 ||
        d - out.entries[static_cast<size_t>(order[i - 1])].delta >= threshold)
      out.classes.emplace_back();
    out.classes.back().push_back(order[i]);
  }
  return out;
}

}  // namespace kerrcat::lindblad
