#pragma once
#include <Eigen/Dense>
#include <algorithm>
#include <boost/numeric/odeint/stepper/controlled_runge_kutta.hpp>
#include <boost/numeric/odeint/stepper/runge_kutta_dopri5.hpp>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "kerrcat/common.hpp"
#include "kerrcat/linalg.hpp"
#include "kerrcat/lindblad/bath.hpp"
#include "kerrcat/lindblad/transitions.hpp"

namespace kerrcat::lindblad {

struct JumpOp {
  double rate = 0;    // kappa at the class representative frequency
  Mat op;             // coherent sum  sum_class X |phi_mu><phi_nu|
  Mat opd_op;         // cached op^dag op
  double delta = 0;   // representative transition frequency
  int class_id = -1;
  int channel = -1;
};

// Collection of dissipators D[op] with rates; no Hamiltonian part -- the
// master equation lives in the Floquet interaction picture where the
// coherent phases are already absorbed.
struct LindbladianRep {
  int dim = 0;
  double omega_d = 0;
  std::vector<JumpOp> jumps;
};

// One dissipator per (quasidegeneracy class x channel).  The representative
// frequency is the class member with the largest summed channel weight; the
// within-class spread is below the threshold, so the choice only moves rates
// by O(threshold).  Lamb shifts are dropped.
inline LindbladianRep assemble(const TransitionTable& table,
                               const BathSpec& baths) {
  baths.validate();
  KC_REQUIRE(!table.entries.empty(), "assemble: empty transition table");
  const auto n_ch = baths.channels.size();
  for (const auto& e : table.entries)
    KC_REQUIRE(e.x.size() == n_ch,
               "assemble: table was built with a different channel count");

  LindbladianRep L;
  L.dim = table.dim;
  L.omega_d = table.omega_d;
  for (size_t c = 0; c < table.classes.size(); ++c) {
    const auto& cls = table.classes[c];
    int rep = cls.front();
    double best = -1;
    for (int ei : cls) {
      double w = 0;
      for (const auto& xv : table.entries[static_cast<size_t>(ei)].x)
        w += std::abs(xv);
      // relative slop keeps exact-tie resolution stable against rounding
      // noise (e.g. pure gauge phases on the modes)
      if (w > best * (1.0 + 1e-9)) {
        best = w;
        rep = ei;
      }
    }
    const double delta = table.entries[static_cast<size_t>(rep)].delta;
    for (size_t ch = 0; ch < n_ch; ++ch) {
      Mat A = Mat::Zero(table.dim, table.dim);
      for (int ei : cls) {
        const auto& e = table.entries[static_cast<size_t>(ei)];
        A(e.mu, e.nu) += e.x[ch];
      }
      if (max_abs(A) == 0.0) continue;
      const double rate = kappa(delta, baths.channels[ch], table.omega_d);
      KC_REQUIRE(rate >= 0, "assemble: negative rate");
      if (rate == 0.0) continue;
      JumpOp j;
      j.rate = rate;
      j.opd_op = A.adjoint() * A;
      j.op = std::move(A);
      j.delta = delta;
      j.class_id = static_cast<int>(c);
      j.channel = static_cast<int>(ch);
      L.jumps.push_back(std::move(j));
    }
  }
  return L;
}

// Right-hand side of the master equation, matrix-free.
inline Mat apply(const LindbladianRep& L, const Mat& rho) {
  Mat out = Mat::Zero(L.dim, L.dim);
  for (const auto& j : L.jumps) {
    out.noalias() += j.rate * (j.op * rho * j.op.adjoint());
    out.noalias() -= (0.5 * j.rate) * (j.opd_op * rho);
    out.noalias() -= (0.5 * j.rate) * (rho * j.opd_op);
  }
  return out;
}

namespace detail {
inline Mat kron(const Mat& A, const Mat& B) {
  Mat K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return K;
}
}  // namespace detail

// Dense superoperator on column-major vec(rho).
inline Mat superoperator(const LindbladianRep& L) {
  const Eigen::Index d = L.dim;
  const Mat id = Mat::Identity(d, d);
  Mat S = Mat::Zero(d * d, d * d);
  for (const auto& j : L.jumps) {
    S += j.rate * detail::kron(j.op.conjugate(), j.op);
    S -= (0.5 * j.rate) * detail::kron(id, j.opd_op);
    S -= (0.5 * j.rate) * detail::kron(j.opd_op.transpose(), id);
  }
  return S;
}

struct GapResult {
  double gap = 0;     // smallest nonzero |Re lambda|
  double second = 0;  // next candidate, for diagnostics
  bool flagged = false;           // zero cluster not cleanly separated
  bool degenerate_kernel = false; // more than one numerically exact zero
  Vec spectrum;                   // sorted by modulus, ascending
};

// Spectral gap of the Lindbladian.  Numerically exact zeros (moduli twelve
// decades below the spectral scale) form the kernel; more than one means a
// degenerate kernel (disconnected sectors, dark coherences).  If the kernel
// is not separated from the rest by at least three decades the split is
// ambiguous -- a metastable manifold -- and both candidates are returned
// with the flag set.
inline GapResult liouvillian_gap(const LindbladianRep& L) {
  KC_REQUIRE(L.dim >= 2, "liouvillian_gap: need at least a qubit");
  KC_REQUIRE(L.dim <= 64,
             "liouvillian_gap: superoperator too large for dense spectra; "
             "reduce the level cut");
  Vec vals = eig_general(superoperator(L), /*with_vectors=*/false).values;
  std::sort(vals.begin(), vals.end(),
            [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });

  GapResult g;
  g.spectrum = vals;
  const auto n = vals.size();
  const double scale = std::abs(vals(n - 1));
  if (scale == 0.0) {  // null map: everything is stationary
    g.flagged = true;
    g.degenerate_kernel = true;
    return g;
  }
  Eigen::Index n_zero = 0;
  while (n_zero < n && std::abs(vals(n_zero)) <= 1e-12 * scale) ++n_zero;
  if (n_zero == 0) n_zero = 1;  // smallest modulus is the kernel candidate
  g.degenerate_kernel = n_zero >= 2;
  if (n_zero >= n) {
    g.flagged = true;
    return g;
  }
  if (std::abs(vals(n_zero - 1)) >= 1e-3 * std::abs(vals(n_zero)))
    g.flagged = true;  // kernel not cleanly separated
  g.gap = std::abs(vals(n_zero).real());
  double second = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = n_zero; i < n; ++i) {
    const double re = std::abs(vals(i).real());
    if (re < g.gap) {
      second = g.gap;
      g.gap = re;
    } else if (re < second) {
      second = re;
    }
  }
  g.second = std::isfinite(second) ? second : g.gap;
  return g;
}

struct EvolveConfig {
  enum class Method { automatic, exponential, adaptive };
  Method method = Method::automatic;
  double rtol = 1e-8;
  double atol = 1e-12;
  int max_expm_dim = 40;          // spectral path cap (superoperator 1600^2)
  double min_step_fraction = 1e-12;  // stiffness bail-out vs span
};

struct Trajectory {
  RVec times;
  std::vector<Mat> rho;
  int rejected_steps = 0;
  double max_trace_drift = 0;
  std::string method;
};

namespace detail {

inline void check_state(const Mat& rho0) {
  KC_REQUIRE(rho0.rows() == rho0.cols(), "evolve: state must be square");
  KC_REQUIRE(max_abs(rho0 - rho0.adjoint()) <
                 1e-10 * std::max(1.0, max_abs(rho0)),
             "evolve: initial state must be Hermitian");
  KC_REQUIRE(std::abs(rho0.trace().real() - 1.0) < 1e-10 &&
                 std::abs(rho0.trace().imag()) < 1e-10,
             "evolve: initial state must have unit trace");
  Eigen::SelfAdjointEigenSolver<Mat> es(rho0);
  KC_REQUIRE(es.eigenvalues().minCoeff() > -1e-8,
             "evolve: initial state must be positive semidefinite");
}

inline Trajectory evolve_exponential(const Mat& rho0, const LindbladianRep& L,
                                     const RVec& times) {
  const Eigen::Index d = L.dim;
  EigGeneral es = eig_general(superoperator(L));
  Eigen::PartialPivLU<Mat> lu(es.vectors);
  Vec c = lu.solve(Eigen::Map<const Vec>(rho0.data(), d * d));

  Trajectory out;
  out.times = times;
  out.method = "exponential";
  for (Eigen::Index it = 0; it < times.size(); ++it) {
    Vec y = es.vectors * (c.array() * (es.values.array() * times(it)).exp()).matrix();
    Mat rho = Eigen::Map<const Mat>(y.data(), d, d);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    out.max_trace_drift =
        std::max(out.max_trace_drift, std::abs(rho.trace().real() - 1.0));
    out.rho.push_back(std::move(rho));
  }
  KC_REQUIRE(out.max_trace_drift < 1e-8,
             "evolve: trace drift beyond tolerance on the spectral path");
  return out;
}

inline Trajectory evolve_adaptive(const Mat& rho0, const LindbladianRep& L,
                                  const RVec& times, const EvolveConfig& cfg) {
  namespace ode = boost::numeric::odeint;
  using state_t = std::vector<cplx>;
  const Eigen::Index d = L.dim;

  auto rhs = [&](const state_t& x, state_t& dxdt, double) {
    const Mat rho = Eigen::Map<const Mat>(x.data(), d, d);
    dxdt.resize(x.size());
    Eigen::Map<Mat>(dxdt.data(), d, d) = lindblad::apply(L, rho);
  };

  state_t x(static_cast<size_t>(d * d));
  Eigen::Map<Mat>(x.data(), d, d) = rho0;

  ode::controlled_runge_kutta<ode::runge_kutta_dopri5<state_t>> ctrl(
      ode::default_error_checker<double, ode::range_algebra,
                                 ode::default_operations>(cfg.atol, cfg.rtol));

  Trajectory out;
  out.times = times;
  out.method = "adaptive";
  const double span = std::max(times(times.size() - 1), 1e-300);
  double t = 0.0, dt = span / 1000.0;
  for (Eigen::Index it = 0; it < times.size(); ++it) {
    const double t_goal = times(it);
    while (t < t_goal) {
      dt = std::min(dt, t_goal - t);
      auto r = ctrl.try_step(rhs, x, t, dt);
      if (r == ode::controlled_step_result::fail) {
        ++out.rejected_steps;
        KC_REQUIRE(dt > cfg.min_step_fraction * span,
                   "evolve: stiffness failure, " +
                       std::to_string(out.rejected_steps) +
                       " rejected steps before the step size underflowed");
      } else {
        Eigen::Map<Mat> rho(x.data(), d, d);
        rho = 0.5 * (rho + rho.adjoint()).eval();  // enforce Hermiticity
      }
    }
    Mat rho = Eigen::Map<const Mat>(x.data(), d, d);
    out.max_trace_drift =
        std::max(out.max_trace_drift, std::abs(rho.trace().real() - 1.0));
    out.rho.push_back(std::move(rho));
  }
  KC_REQUIRE(out.max_trace_drift < 1e-8,
             "evolve: trace drift beyond tolerance on the adaptive path");
  return out;
}

}  // namespace detail

// Propagate a density matrix (Floquet-mode basis) through the dissipative
// map.  Spectral (exact-exponential) path for small representations,
// adaptive embedded Runge-Kutta otherwise.
inline Trajectory evolve(const Mat& rho0, const LindbladianRep& L,
                         const RVec& times, const EvolveConfig& cfg = {}) {
  KC_REQUIRE(times.size() > 0, "evolve: no output times");
  KC_REQUIRE(times(0) >= 0, "evolve: times must start at or after zero");
  for (Eigen::Index i = 1; i < times.size(); ++i)
    KC_REQUIRE(times(i) > times(i - 1), "evolve: times must be ascending");
  KC_REQUIRE(rho0.rows() == L.dim, "evolve: state dimension mismatch");
  detail::check_state(rho0);

  const bool small = L.dim <= cfg.max_expm_dim;
  switch (cfg.method) {
    case EvolveConfig::Method::exponential:
      return detail::evolve_exponential(rho0, L, times);
    case EvolveConfig::Method::adaptive:
      return detail::evolve_adaptive(rho0, L, times, cfg);
    case EvolveConfig::Method::automatic:
    default:
      return small ? detail::evolve_exponential(rho0, L, times)
                   : detail::evolve_adaptive(rho0, L, times, cfg);
  }
}

}  // namespace kerrcat::lindblad
