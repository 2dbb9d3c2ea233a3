#pragma once
#include <Eigen/Dense>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace kerrcat {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr cplx I{0.0, 1.0};

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define KC_REQUIRE(cond, msg) \
  do { if (!(cond)) throw ::kerrcat::error(msg); } while (0)

inline double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

inline Mat hermitize(const Mat& m) { return 0.5 * (m + m.adjoint()); }

// ||V^dag V - 1||_max over a set of column vectors
inline double orthonormality_residual(const Mat& v) {
  Mat g = v.adjoint() * v;
  g.diagonal().array() -= 1.0;
  return max_abs(g);
}

inline double unitarity_residual(const Mat& u) {
  return orthonormality_residual(u);
}

// Rotate each column so its largest-magnitude component is real positive.
inline void gauge_fix_columns(Mat& v) {
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    Eigen::Index imax = 0;
    v.col(c).cwiseAbs().maxCoeff(&imax);
    cplx z = v(imax, c);
    if (std::abs(z) > 0) v.col(c) *= std::conj(z) / std::abs(z);
  }
}

// Smallest-magnitude representative of w modulo m (result in [-m/2, m/2)).
inline double wrap_centered(double w, double m) {
  double r = std::fmod(w, m);
  if (r < -m / 2) r += m;
  if (r >= m / 2) r -= m;
  return r;
}

// Circular distance between a and b on a ring of circumference m.
inline double circular_distance(double a, double b, double m) {
  return std::abs(wrap_centered(a - b, m));
}

// Maximum-weight bipartite assignment (Jonker-Volgenant style shortest
// augmenting paths on the negated weights).  weight(i,j) >= 0; returns
// perm with perm[row] = assigned column, maximizing total weight.
inline std::vector<int> max_weight_assignment(const RMat& weight) {
  const int n = static_cast<int>(weight.rows());
  KC_REQUIRE(weight.cols() == n, "assignment: matrix must be square");
  const double big = std::numeric_limits<double>::infinity();
  // cost = max - weight, solve min-cost assignment
  double wmax = n ? weight.maxCoeff() : 0.0;
  RMat cost = RMat::Constant(n, n, wmax) - weight;

  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, n), way(n + 1, n);
  for (int i = 0; i < n; ++i) {
    p[n] = i;
    int j0 = n;
    std::vector<double> minv(n + 1, big);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      int i0 = p[j0], j1 = -1;
      double delta = big;
      for (int j = 0; j < n; ++j) {
        if (used[j]) continue;
        double cur = cost(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) { minv[j] = cur; way[j] = j0; }
        if (minv[j] < delta) { delta = minv[j]; j1 = j; }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) { u[p[j]] += delta; v[j] -= delta; }
        else minv[j] -= delta;
      }
      j0 = j1;
    } while (p[j0] != n);
    do { int j1 = way[j0]; p[j0] = p[j1]; j0 = j1; } while (j0 != n);
  }
  std::vector<int> perm(n, -1);
  for (int j = 0; j < n; ++j)
    if (p[j] != n) perm[p[j]] = j;
  return perm;
}

}  // namespace kerrcat
