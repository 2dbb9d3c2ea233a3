#pragma once
#include <Eigen/Dense>
#include <complex>
#include <utility>

#include "kerrcat/common.hpp"

#define LAPACK_COMPLEX_CUSTOM
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace kerrcat {

// Dense symmetric/Hermitian eigensolvers routed through LAPACK's
// divide-and-conquer drivers; noticeably faster than the built-in QR
// iteration once the dimension passes a few hundred.  Eigenvalues ascending.

struct EigSymReal {
  RVec values;
  RMat vectors;
};

struct EigHerm {
  RVec values;
  Mat vectors;
};

inline EigSymReal eig_sym(RMat A) {
  const lapack_int n = static_cast<lapack_int>(A.rows());
  KC_REQUIRE(A.cols() == A.rows(), "eig_sym: square matrix required");
  EigSymReal out;
  out.values.resize(n);
  lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, A.data(), n, out.values.data());
  KC_REQUIRE(info == 0, "eig_sym: dsyevd failed");
  out.vectors = std::move(A);
  return out;
}

inline EigHerm eig_herm(Mat A) {
  const lapack_int n = static_cast<lapack_int>(A.rows());
  KC_REQUIRE(A.cols() == A.rows(), "eig_herm: square matrix required");
  EigHerm out;
  out.values.resize(n);
  lapack_int info =
      LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n, A.data(), n, out.values.data());
  KC_REQUIRE(info == 0, "eig_herm: zheevd failed");
  out.vectors = std::move(A);
  return out;
}

struct EigGeneral {
  Vec values;
  Mat vectors;  // right eigenvectors; empty when not requested
};

// Dense non-Hermitian eigendecomposition (Liouvillian spectra).
inline EigGeneral eig_general(Mat A, bool with_vectors = true) {
  const lapack_int n = static_cast<lapack_int>(A.rows());
  KC_REQUIRE(A.cols() == A.rows(), "eig_general: square matrix required");
  EigGeneral out;
  out.values.resize(n);
  if (with_vectors) out.vectors.resize(n, n);
  lapack_int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'N', with_vectors ? 'V' : 'N', n, A.data(), n,
      out.values.data(), nullptr, 1, with_vectors ? out.vectors.data() : nullptr,
      with_vectors ? n : 1);
  KC_REQUIRE(info == 0, "eig_general: zgeev failed");
  return out;
}

}  // namespace kerrcat
