#pragma once
#include <Eigen/Dense>
#include <cmath>

#include "kerrcat/common.hpp"

namespace kerrcat::circuit {

// annihilation operator in an n-dimensional Fock space (real matrix)
inline RMat fock_a(int n) {
  RMat a = RMat::Zero(n, n);
  for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(double(k));
  return a;
}

// eigendecomposition of x = a + a^dag, used to build trig functions of the
// phase operator as exact functions of the truncated x
struct XEig {
  RMat Q;
  RVec x;
};

inline XEig fock_x_eig(int n) {
  RMat a = fock_a(n);
  RMat x = a + a.transpose();
  Eigen::SelfAdjointEigenSolver<RMat> es(x);
  KC_REQUIRE(es.info() == Eigen::Success, "fock_x_eig: eigensolver failed");
  return {es.eigenvectors(), es.eigenvalues()};
}

// f(offset + scale * x) for f = cos / sin
inline RMat op_cos(const XEig& e, double offset, double scale) {
  RVec d = (offset + scale * e.x.array()).cos();
  return e.Q * d.asDiagonal() * e.Q.transpose();
}

inline RMat op_sin(const XEig& e, double offset, double scale) {
  RVec d = (offset + scale * e.x.array()).sin();
  return e.Q * d.asDiagonal() * e.Q.transpose();
}

}  // namespace kerrcat::circuit
