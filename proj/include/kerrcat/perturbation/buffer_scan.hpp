#pragma once
#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "kerrcat/common.hpp"
#include "kerrcat/perturbation/displaced_frame.hpp"

// Order scan for the leading coupling between a low computational branch and
// a high branch carrying one auxiliary-mode excitation.  Same-parity branches
// couple through a^dag^{2k} terms whose prefactors scale as
// phi_zpf^{3k-2} Pi^{k-1}; the scan tabulates the resulting magnitudes and
// reports which order dominates.

namespace kerrcat::perturbation {

struct CouplingOrderScan {
  std::vector<int> k;
  RVec magnitude;
  int argmax_k = 0;
};

inline CouplingOrderScan buffer_coupling_order_scan(
    const SqueezedKerrSpectrum& sk, double phi_zpf, cplx Pi, int mu = 17,
    int nu = 7, int k_min = 1, int k_max = 5) {
  KC_REQUIRE(phi_zpf > 0, "coupling order scan: bad zero-point fluctuation");
  KC_REQUIRE(k_min >= 1 && k_max >= k_min, "coupling order scan: bad k range");
  KC_REQUIRE(mu >= 0 && mu < sk.dim && nu >= 0 && nu < sk.dim,
             "coupling order scan: branch out of range");
  KC_REQUIRE((mu - nu) % 2 == 0,
             "coupling order scan: branches must share parity");

  // both states must be comfortably inside the truncation, with headroom for
  // the largest ladder power
  const int head = 2 * k_max + 4;
  KC_REQUIRE(sk.dim > std::max(mu, nu) + head,
             "coupling order scan: truncation too small for these branches");
  auto tail_weight = [&](int branch) {
    double w = 0;
    for (int i = sk.dim - head; i < sk.dim; ++i)
      w += std::norm(sk.states(i, branch));
    return w;
  };
  KC_REQUIRE(tail_weight(mu) < 1e-8 && tail_weight(nu) < 1e-8,
             "coupling order scan: branch leaks into the truncation edge");

  Mat ad = Mat::Zero(sk.dim, sk.dim);
  for (int i = 1; i < sk.dim; ++i) ad(i, i - 1) = std::sqrt(double(i));

  CouplingOrderScan out;
  out.magnitude.resize(k_max - k_min + 1);
  Mat power = Mat::Identity(sk.dim, sk.dim);
  for (int i = 0; i < 2 * k_min; ++i) power = Mat(ad * power);
  for (int k = k_min; k <= k_max; ++k) {
    const cplx el = sk.states.col(mu).dot(power * sk.states.col(nu));
    const double mag = std::pow(phi_zpf, 3 * k - 2) *
                       std::pow(std::abs(Pi), k - 1) * std::abs(el);
    out.k.push_back(k);
    out.magnitude(k - k_min) = mag;
    if (k < k_max) power = Mat(ad * ad * power);
  }
  int best = 0;
  for (int i = 1; i < out.magnitude.size(); ++i)
    if (out.magnitude(i) > out.magnitude(best)) best = i;
  out.argmax_k = out.k[static_cast<std::size_t>(best)];
  return out;
}

}  // namespace kerrcat::perturbation
