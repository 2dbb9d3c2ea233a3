#pragma once
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "kerrcat/common.hpp"

namespace kerrcat::floquet {

struct FloquetModes {
  RVec quasi;  // quasienergies, ascending within [-omega/2, omega/2)
  Mat modes;   // t = 0 Floquet modes, column mu
  int n_cluster_fixes = 0;  // degenerate eigenvalue clusters re-orthonormalized
};

// Diagonalize a one-period propagator: U(T) phi_mu = exp(-i eps_mu T) phi_mu
// with eps_mu reduced to the first Brillouin zone [-omega/2, omega/2).
// Near-degenerate quasienergies (including pairs straddling the zone edge)
// give numerically skewed eigenvectors; those clusters are re-orthonormalized
// by a QR factorization of their span.
inline FloquetModes floquet_decompose(const Mat& U, double omega,
                                      double unitarity_tol = 1e-9,
                                      double cluster_tol = 1e-8) {
  KC_REQUIRE(U.rows() == U.cols(), "floquet_decompose: square matrix required");
  KC_REQUIRE(omega > 0, "floquet_decompose: omega must be positive");
  KC_REQUIRE(unitarity_residual(U) < unitarity_tol,
             "floquet_decompose: propagator is not unitary to tolerance");
  const Eigen::Index d = U.rows();
  const double T = 2.0 * M_PI / omega;

  Eigen::ComplexEigenSolver<Mat> es(U, /*computeEigenvectors=*/true);
  KC_REQUIRE(es.info() == Eigen::Success,
             "floquet_decompose: eigenvalue iteration failed");

  // arg in (-pi, pi] maps eps = -arg/T onto [-omega/2, omega/2) exactly.
  RVec quasi(d);
  for (Eigen::Index i = 0; i < d; ++i)
    quasi(i) = -std::arg(es.eigenvalues()(i)) / T;

  std::vector<Eigen::Index> order(static_cast<size_t>(d));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return quasi(a) < quasi(b); });

  FloquetModes out;
  out.quasi.resize(d);
  out.modes.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    out.quasi(i) = quasi(order[static_cast<size_t>(i)]);
    out.modes.col(i) = es.eigenvectors().col(order[static_cast<size_t>(i)]);
    out.modes.col(i).normalize();
  }

  // Cluster detection on the sorted circle: gap between consecutive
  // quasienergies, including the wrap-around pair at the zone edge.
  const double gap_tol = cluster_tol * omega;
  std::vector<int> cluster_id(static_cast<size_t>(d), 0);
  int n_clusters = 1;
  for (Eigen::Index i = 1; i < d; ++i) {
    if (out.quasi(i) - out.quasi(i - 1) >= gap_tol) ++n_clusters;
    cluster_id[static_cast<size_t>(i)] = n_clusters - 1;
  }
  bool wrap = d > 1 && n_clusters > 1 &&
              (out.quasi(0) + omega - out.quasi(d - 1)) < gap_tol;

  auto fix_span = [&](const std::vector<Eigen::Index>& idx) {
    if (idx.size() < 2) return;
    Mat block(d, static_cast<Eigen::Index>(idx.size()));
    for (size_t k = 0; k < idx.size(); ++k) block.col(static_cast<Eigen::Index>(k)) = out.modes.col(idx[k]);
    Eigen::HouseholderQR<Mat> qr(block);
    Mat q = qr.householderQ() * Mat::Identity(d, static_cast<Eigen::Index>(idx.size()));
    for (size_t k = 0; k < idx.size(); ++k) out.modes.col(idx[k]) = q.col(static_cast<Eigen::Index>(k));
    ++out.n_cluster_fixes;
  };

  for (int c = 0; c < n_clusters; ++c) {
    if (wrap && (c == 0 || c == n_clusters - 1)) continue;  // handled jointly
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < d; ++i)
      if (cluster_id[static_cast<size_t>(i)] == c) idx.push_back(i);
    fix_span(idx);
  }
  if (wrap) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < d; ++i)
      if (cluster_id[static_cast<size_t>(i)] == 0 ||
          cluster_id[static_cast<size_t>(i)] == n_clusters - 1)
        idx.push_back(i);
    fix_span(idx);
  }

  gauge_fix_columns(out.modes);
  return out;
}

}  // namespace kerrcat::floquet
