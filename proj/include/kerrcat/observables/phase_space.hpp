#pragma once
#include <Eigen/Dense>
#include <cmath>
#include <cstdio>

#include "kerrcat/common.hpp"

namespace kerrcat::observables {

// Rectangular grid over the coherent-state label gamma = x + i y.
struct PhaseGrid {
  double re_min = -6, re_max = 6;
  double im_min = -6, im_max = 6;
  int n_re = 101, n_im = 101;

  void validate() const {
    KC_REQUIRE(re_max > re_min && im_max > im_min,
               "PhaseGrid: empty range");
    KC_REQUIRE(n_re >= 64 && n_im >= 64, "PhaseGrid: need >= 64 points per axis");
  }
  double dre() const { return (re_max - re_min) / (n_re - 1); }
  double dim_() const { return (im_max - im_min) / (n_im - 1); }
  double re(int j) const { return re_min + j * dre(); }
  double im(int i) const { return im_min + i * dim_(); }
  double cell() const { return dre() * dim_(); }

  static PhaseGrid covering(double extent, int n = 101) {
    PhaseGrid g;
    g.re_min = g.im_min = -extent;
    g.re_max = g.im_max = extent;
    g.n_re = g.n_im = n;
    return g;
  }
};

// values(i, j) = field at gamma = re(j) + i im(i); integral = sum * cell
struct PhaseField {
  PhaseGrid grid;
  RMat values;
  double integral = 0;
};

// Fock amplitudes of |gamma>, truncated to dim levels.
inline Vec coherent_vector(cplx gamma, int dim) {
  KC_REQUIRE(dim >= 1, "coherent_vector: empty space");
  Vec v(dim);
  v(0) = std::exp(-0.5 * std::norm(gamma));
  for (int n = 1; n < dim; ++n) v(n) = v(n - 1) * gamma / std::sqrt(double(n));
  return v;
}

// Columns k = D(gamma)|k> via the displaced ladder recurrence
// |gamma,k+1> = (a^dag - conj(gamma)) |gamma,k> / sqrt(k+1).
// Truncation sheds weight only when the displaced state reaches the top of
// the Fock window.
inline Mat displaced_fock_columns(cplx gamma, int dim) {
  Mat V(dim, dim);
  V.col(0) = coherent_vector(gamma, dim);
  for (int k = 0; k + 1 < dim; ++k) {
    Vec next = -std::conj(gamma) * V.col(k);
    for (int n = 1; n < dim; ++n)
      next(n) += std::sqrt(double(n)) * V.col(k)(n - 1);
    V.col(k + 1) = next / std::sqrt(double(k + 1));
  }
  return V;
}

namespace detail {
inline void check_density(const Mat& rho) {
  KC_REQUIRE(rho.rows() == rho.cols(), "phase space: density matrix must be square");
  KC_REQUIRE(max_abs(rho - rho.adjoint()) < 1e-8 * std::max(1.0, max_abs(rho)),
             "phase space: density matrix must be Hermitian");
}

inline void coverage_warning(const char* what, double integral, double trace,
                             bool warn) {
  if (warn && integral < 0.99 * trace)
    std::fprintf(stderr,
                 "[kerrcat] warning: %s grid captures %.4f of trace %.4f; "
                 "enlarge the phase-space window\n",
                 what, integral, trace);
}
}  // namespace detail

// Husimi Q(gamma) = <gamma| rho |gamma> / pi.  Nonnegative, unit integral
// over the full plane; `integral` reports the grid-covered portion.
inline PhaseField husimi(const Mat& rho, const PhaseGrid& grid,
                         bool warn_coverage = true) {
  grid.validate();
  detail::check_density(rho);
  const int d = static_cast<int>(rho.rows());
  PhaseField out;
  out.grid = grid;
  out.values.resize(grid.n_im, grid.n_re);
  for (int i = 0; i < grid.n_im; ++i)
    for (int j = 0; j < grid.n_re; ++j) {
      const Vec v = coherent_vector(cplx(grid.re(j), grid.im(i)), d);
      out.values(i, j) = std::real(v.dot(rho * v)) / M_PI;
    }
  out.integral = out.values.sum() * grid.cell();
  detail::coverage_warning("Husimi", out.integral, rho.trace().real(),
                           warn_coverage);
  return out;
}

// Wigner W(gamma) = (2/pi) sum_k (-1)^k <gamma,k| rho |gamma,k> (displaced
// parity).  Integrates to the trace; negative regions are physical.
inline PhaseField wigner(const Mat& rho, const PhaseGrid& grid,
                         bool warn_coverage = true) {
  grid.validate();
  detail::check_density(rho);
  const int d = static_cast<int>(rho.rows());
  PhaseField out;
  out.grid = grid;
  out.values.resize(grid.n_im, grid.n_re);
  for (int i = 0; i < grid.n_im; ++i)
    for (int j = 0; j < grid.n_re; ++j) {
      const Mat V = displaced_fock_columns(cplx(grid.re(j), grid.im(i)), d);
      const Mat RV = rho * V;
      double w = 0;
      for (int k = 0; k < d; ++k) {
        const double term = std::real(V.col(k).dot(RV.col(k)));
        w += (k % 2 == 0) ? term : -term;
      }
      out.values(i, j) = 2.0 * w / M_PI;
    }
  out.integral = out.values.sum() * grid.cell();
  detail::coverage_warning("Wigner", out.integral, rho.trace().real(),
                           warn_coverage);
  return out;
}

}  // namespace kerrcat::observables
