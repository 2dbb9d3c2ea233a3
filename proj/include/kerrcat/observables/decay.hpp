#pragma once
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "kerrcat/common.hpp"
#include "kerrcat/observables/phase_space.hpp"

namespace kerrcat::observables {

constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();

// Least-squares fit of y = A exp(-t/tau) + C.  tau is profiled on a log
// scale (the amplitude and offset are linear given tau), then refined by
// golden-section search; robust and derivative-free.
struct ExpFit {
  double A = 0;
  double tau = kInfiniteTime;
  double C = 0;
  double r2 = 1.0;
  bool decaying = false;
};

namespace detail {
// best SSE in (A, C) for fixed tau; outputs the coefficients
inline double profile_sse(const RVec& t, const RVec& y, double tau, double* A,
                          double* C) {
  const Eigen::Index n = t.size();
  RVec e = (-t.array() / tau).exp();
  const double se = e.sum(), see = e.squaredNorm();
  const double sy = y.sum(), sey = e.dot(y);
  const double det = see * n - se * se;
  double a, c;
  if (std::abs(det) < 1e-300) {
    a = 0;
    c = sy / n;
  } else {
    a = (sey * n - se * sy) / det;
    c = (see * sy - se * sey) / det;
  }
  if (A) *A = a;
  if (C) *C = c;
  return (y.array() - a * e.array() - c).matrix().squaredNorm();
}
}  // namespace detail

inline ExpFit fit_exponential(const RVec& t, const RVec& y) {
  KC_REQUIRE(t.size() == y.size() && t.size() >= 4,
             "fit_exponential: need at least 4 samples");
  const Eigen::Index n = t.size();
  for (Eigen::Index i = 1; i < n; ++i)
    KC_REQUIRE(t(i) > t(i - 1), "fit_exponential: times must be ascending");

  ExpFit fit;
  const double mean = y.mean();
  const double sst = (y.array() - mean).matrix().squaredNorm();
  if (sst <= 1e-20 * std::max(1.0, y.cwiseAbs().maxCoeff()) * n) {
    fit.C = mean;  // flat signal: nothing decays
    return fit;
  }

  double span = t(n - 1) - t(0);
  double dt_min = span;
  for (Eigen::Index i = 1; i < n; ++i) dt_min = std::min(dt_min, t(i) - t(i - 1));
  const double lo = std::log(0.1 * dt_min), hi = std::log(100.0 * span);

  double best_l = lo, best_sse = std::numeric_limits<double>::infinity();
  const int n_scan = 80;
  for (int s = 0; s < n_scan; ++s) {
    const double l = lo + (hi - lo) * s / (n_scan - 1);
    const double sse = detail::profile_sse(t, y, std::exp(l), nullptr, nullptr);
    if (sse < best_sse) {
      best_sse = sse;
      best_l = l;
    }
  }
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = std::max(lo, best_l - (hi - lo) / (n_scan - 1));
  double b = std::min(hi, best_l + (hi - lo) / (n_scan - 1));
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = detail::profile_sse(t, y, std::exp(x1), nullptr, nullptr);
  double f2 = detail::profile_sse(t, y, std::exp(x2), nullptr, nullptr);
  for (int it = 0; it < 60; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = detail::profile_sse(t, y, std::exp(x1), nullptr, nullptr);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = detail::profile_sse(t, y, std::exp(x2), nullptr, nullptr);
    }
  }
  const double tau = std::exp(0.5 * (a + b));
  const double sse = detail::profile_sse(t, y, tau, &fit.A, &fit.C);
  fit.r2 = 1.0 - sse / sst;
  // a fit pinned at the upper tau bound is not a measured decay
  if (tau >= 0.99 * 100.0 * span || std::abs(fit.A) < 1e-12) {
    fit.tau = kInfiniteTime;
    fit.C = mean;
    fit.decaying = false;
  } else {
    fit.tau = tau;
    fit.decaying = true;
  }
  return fit;
}

// Assignment-error curves from the ideal likelihood discriminator: at each
// time the plane is split by the sign of ln(Q_+/Q_-) and each trajectory is
// scored against its own label.
struct AssignmentErrorSeries {
  RVec t;
  RVec x_plus, x_minus;         // X = 1 - 2 P(wrong | prepared)
  double tau = kInfiniteTime;   // average of the two fitted scales
  double tau_plus = kInfiniteTime, tau_minus = kInfiniteTime;
  double r2_plus = 1.0, r2_minus = 1.0;
  bool flagged = false;         // poor fit, refit on trimmed window
};

inline AssignmentErrorSeries assignment_error_series(
    const RVec& times, const std::vector<Mat>& rho_plus,
    const std::vector<Mat>& rho_minus, const PhaseGrid& grid) {
  const auto n = static_cast<size_t>(times.size());
  KC_REQUIRE(n >= 4, "assignment_error_series: need at least 4 times");
  KC_REQUIRE(rho_plus.size() == n && rho_minus.size() == n,
             "assignment_error_series: trajectory length mismatch");

  AssignmentErrorSeries out;
  out.t = times;
  out.x_plus.resize(times.size());
  out.x_minus.resize(times.size());
  for (size_t i = 0; i < n; ++i) {
    const PhaseField qp = husimi(rho_plus[i], grid, /*warn=*/i == 0);
    const PhaseField qm = husimi(rho_minus[i], grid, /*warn=*/i == 0);
    double wrong_plus = 0, wrong_minus = 0;  // P(-|+), P(+|-)
    for (int r = 0; r < grid.n_im; ++r)
      for (int c = 0; c < grid.n_re; ++c) {
        const double p = qp.values(r, c), m = qm.values(r, c);
        if (p < m)
          wrong_plus += p;
        else if (p == m)
          wrong_plus += 0.5 * p;
        if (m < p)
          wrong_minus += m;
        else if (m == p)
          wrong_minus += 0.5 * m;
      }
    out.x_plus(static_cast<Eigen::Index>(i)) =
        1.0 - 2.0 * wrong_plus * grid.cell();
    out.x_minus(static_cast<Eigen::Index>(i)) =
        1.0 - 2.0 * wrong_minus * grid.cell();
  }

  ExpFit fp = fit_exponential(times, out.x_plus);
  ExpFit fm = fit_exponential(times, out.x_minus);
  const auto trim = [&](const RVec& y) {
    const Eigen::Index keep = std::max<Eigen::Index>(4, 2 * times.size() / 3);
    return fit_exponential(times.head(keep), y.head(keep));
  };
  if (fp.decaying && fp.r2 < 0.95) {
    fp = trim(out.x_plus);
    out.flagged = true;
  }
  if (fm.decaying && fm.r2 < 0.95) {
    fm = trim(out.x_minus);
    out.flagged = true;
  }
  out.tau_plus = fp.tau;
  out.tau_minus = fm.tau;
  out.r2_plus = fp.r2;
  out.r2_minus = fm.r2;
  out.tau = (std::isfinite(fp.tau) && std::isfinite(fm.tau))
                ? 0.5 * (fp.tau + fm.tau)
                : kInfiniteTime;
  return out;
}

// Two-stage coherence fit: the initial decay rate of <X_L>(t) before the
// slow tail takes over.
struct TZResult {
  double T_Z = kInfiniteTime;
  double tau_tail = kInfiniteTime;
  double t_star = 0;        // end of the initial-fit window
  bool single_stage = false;  // no scale separation found
  double r2 = 1.0;
};

inline TZResult coherence_time_TZ(const RVec& times, const RVec& xl) {
  const Eigen::Index n = times.size();
  KC_REQUIRE(xl.size() == n && n >= 8,
             "coherence_time_TZ: need at least 8 samples");

  // instantaneous log-derivative rates between samples
  std::vector<double> rate(static_cast<size_t>(n - 1),
                           std::numeric_limits<double>::quiet_NaN());
  for (Eigen::Index i = 0; i + 1 < n; ++i)
    if (xl(i) > 0 && xl(i + 1) > 0)
      rate[static_cast<size_t>(i)] =
          -(std::log(xl(i + 1)) - std::log(xl(i))) / (times(i + 1) - times(i));

  // slow rate: median over the last third of the usable rates
  std::vector<double> tail;
  for (size_t i = static_cast<size_t>(2 * (n - 1) / 3); i < rate.size(); ++i)
    if (std::isfinite(rate[i])) tail.push_back(rate[i]);

  TZResult out;
  Eigen::Index i_star = -1;
  if (!tail.empty()) {
    std::nth_element(tail.begin(), tail.begin() + tail.size() / 2, tail.end());
    const double slow = tail[tail.size() / 2];
    out.tau_tail = slow > 0 ? 1.0 / slow : kInfiniteTime;
    for (size_t i = 0; i < rate.size(); ++i)
      if (std::isfinite(rate[i]) &&
          std::abs(rate[i] - slow) <= 0.2 * std::abs(slow)) {
        i_star = static_cast<Eigen::Index>(i);
        break;
      }
  }
  if (i_star < 0) {
    // fallback: first 10% amplitude drop
    const double floor_val = xl(0) - 0.1 * std::abs(xl(0));
    i_star = n - 1;
    for (Eigen::Index i = 0; i < n; ++i)
      if (xl(i) <= floor_val) {
        i_star = i;
        break;
      }
  }
  if (i_star <= 0) {
    // the very first rate already matches the tail: one scale only
    out.single_stage = true;
    i_star = n - 1;
  }
  const Eigen::Index keep = std::max<Eigen::Index>(5, i_star + 1);
  out.t_star = times(std::min(keep, n) - 1);
  ExpFit fit = fit_exponential(times.head(std::min(keep, n)),
                               xl.head(std::min(keep, n)));
  out.T_Z = fit.tau;
  out.r2 = fit.r2;
  return out;
}

}  // namespace kerrcat::observables
