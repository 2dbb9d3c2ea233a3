#pragma once
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "kerrcat/common.hpp"
#include "kerrcat/floquet/modes.hpp"
#include "kerrcat/floquet/propagator.hpp"
#include "kerrcat/floquet/tuning.hpp"
#include "kerrcat/units.hpp"

namespace kerrcat::floquet {

struct SweepPlan {
  RVec amplitudes;         // drive amplitudes, ascending, typically from 0
  bool tune = true;        // retune the drive frequency at every amplitude
  double omega_fixed = 0;  // drive frequency when tune == false
  double omega_seed = 0;   // tuner seed at the first point (0: 2*(E1-E0))
  double phase = 0;
  PropagatorConfig prop{};
  TuneConfig tune_cfg{};
  double fid_floor = 0.3;    // below this a branch is flagged lost
  Mat num_op;                // photon-number operator (empty: skip photons)
  bool micromotion = false;  // sample micromotion for the point callback
};

struct FloquetPoint {
  double eps_d = 0;
  double omega_d = 0;
  RVec quasi;      // per branch after continuity reordering
  RVec unfolded;   // quasi_b - quasi_0 continued across zone folds
  RVec fidelity;   // |<prev_b|new_b>|
  RVec photons;    // diag of num_op in the Floquet modes (empty if unused)
  std::vector<int> partner;  // branch owning the strongest foreign overlap
  RVec foreign;              // magnitude of that strongest foreign overlap
  std::vector<int> lost;     // branches with fidelity below the floor
  int n_cluster_fixes = 0;
  int tune_iterations = 0;
  double tune_residual = 0;  // |eps_1 - eps_0 - omega/2| actually achieved
};

// Everything a per-point consumer (dissipator assembly, checkpointing) needs;
// modes and samples are only valid during the callback.
struct FloquetPointFull {
  const FloquetPoint& summary;
  const Mat& modes_t0;
  const std::vector<Mat>& samples;  // empty unless plan.micromotion
};

// Tracking chain state between points; serializable for resume.
struct SweepState {
  std::size_t next = 0;  // index of the next amplitude to process
  double omega = 0;      // frequency seed carried to the next point
  Mat prev_modes;
  RVec prev_unfolded;
};

struct FloquetBranchSet {
  RVec amplitudes;  // the full grid (including points from earlier runs)
  std::vector<FloquetPoint> points;  // points computed in this call
  std::size_t first_point = 0;       // grid index of points.front()
};

using PointCallback = std::function<void(const FloquetPointFull&)>;

namespace detail {

// Degenerate quasienergy clusters carry an arbitrary unitary ambiguity that
// the eigensolver resolves at random.  Re-pick each cluster basis as the
// projection of the previous point's modes onto the cluster span (unitary
// Procrustes), so continuity tracking stays meaningful through exact kissing.
inline int align_clusters(FloquetModes& fm, const Mat& prev, double omega,
                          double cluster_tol = 1e-8) {
  const Eigen::Index d = fm.quasi.size();
  const double gap_tol = cluster_tol * omega;
  int n_aligned = 0;

  auto align = [&](const std::vector<Eigen::Index>& idx) {
    const auto m = static_cast<Eigen::Index>(idx.size());
    if (m < 2) return;
    Mat Q(d, m);
    for (Eigen::Index k = 0; k < m; ++k) Q.col(k) = fm.modes.col(idx[static_cast<size_t>(k)]);
    Mat M = Q.adjoint() * prev;  // m x n overlaps with all previous branches
    // greedily take the m previous branches living mostly inside the span
    std::vector<Eigen::Index> pick;
    std::vector<bool> used(static_cast<size_t>(M.cols()), false);
    for (Eigen::Index k = 0; k < m; ++k) {
      Eigen::Index best = -1;
      double bw = -1;
      for (Eigen::Index c = 0; c < M.cols(); ++c) {
        if (used[static_cast<size_t>(c)]) continue;
        const double w = M.col(c).squaredNorm();
        if (w > bw) { bw = w; best = c; }
      }
      used[static_cast<size_t>(best)] = true;
      pick.push_back(best);
    }
    Mat B(m, m);
    for (Eigen::Index k = 0; k < m; ++k) B.col(k) = M.col(pick[static_cast<size_t>(k)]);
    Eigen::JacobiSVD<Mat> svd(B, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat W = svd.matrixU() * svd.matrixV().adjoint();
    Mat aligned = Q * W;
    for (Eigen::Index k = 0; k < m; ++k) fm.modes.col(idx[static_cast<size_t>(k)]) = aligned.col(k);
    ++n_aligned;
  };

  std::vector<std::vector<Eigen::Index>> segs{{0}};
  for (Eigen::Index i = 1; i < d; ++i) {
    if (fm.quasi(i) - fm.quasi(i - 1) < gap_tol) segs.back().push_back(i);
    else segs.push_back({i});
  }
  const bool wrap =
      d > 1 && segs.size() > 1 && (fm.quasi(0) + omega - fm.quasi(d - 1)) < gap_tol;
  if (wrap) {  // zone edge split one physical cluster in two
    for (Eigen::Index i : segs.back()) segs.front().push_back(i);
    segs.pop_back();
  }
  for (const auto& s : segs) align(s);
  return n_aligned;
}

}  // namespace detail

// Amplitude sweep with branch tracking.  Per point: tune (or fix) the drive
// frequency, decompose the one-period propagator, align degenerate clusters
// to the previous point, reorder branches by optimal assignment on the
// squared overlap matrix, then record fidelities, photon numbers and the
// zone-unfolded quasienergy offsets.  `state`, when given, carries the chain
// across calls so an interrupted sweep resumes mid-grid.
inline FloquetBranchSet sweep(const SplitPropagator& prop, const SweepPlan& plan,
                              SweepState* state = nullptr,
                              const PointCallback& on_point = {}) {
  const Eigen::Index d = prop.dim();
  KC_REQUIRE(plan.amplitudes.size() > 0, "sweep: empty amplitude grid");
  for (Eigen::Index i = 0; i + 1 < plan.amplitudes.size(); ++i)
    KC_REQUIRE(plan.amplitudes(i) < plan.amplitudes(i + 1),
               "sweep: amplitudes must be strictly ascending");
  KC_REQUIRE(plan.tune || plan.omega_fixed > 0,
             "sweep: fixed-frequency mode requires omega_fixed > 0");
  KC_REQUIRE(plan.num_op.size() == 0 ||
                 (plan.num_op.rows() == d && plan.num_op.cols() == d),
             "sweep: num_op dimension mismatch");
  KC_REQUIRE(d >= 2, "sweep: need at least two levels to track");

  SweepState local;
  SweepState& st = state ? *state : local;
  if (st.next == 0) {
    st.prev_modes = Mat::Identity(d, d);
    st.prev_unfolded = prop.energies().array() - prop.energies()(0);
    st.omega = plan.tune
                   ? (plan.omega_seed > 0
                          ? plan.omega_seed
                          : 2.0 * (prop.energies()(1) - prop.energies()(0)))
                   : plan.omega_fixed;
  } else {
    KC_REQUIRE(st.prev_modes.rows() == d && st.prev_modes.cols() == d &&
                   st.prev_unfolded.size() == d && st.omega > 0,
               "sweep: resume state is inconsistent with this system");
    KC_REQUIRE(st.next <= static_cast<std::size_t>(plan.amplitudes.size()),
               "sweep: resume index beyond the grid");
  }

  FloquetBranchSet out;
  out.amplitudes = plan.amplitudes;
  out.first_point = st.next;

  for (std::size_t ip = st.next;
       ip < static_cast<std::size_t>(plan.amplitudes.size()); ++ip) {
    const double eps = plan.amplitudes(static_cast<Eigen::Index>(ip));
    FloquetPoint pt;
    pt.eps_d = eps;

    double omega = plan.tune ? st.omega : plan.omega_fixed;
    Mat U;
    FloquetModes fm;
    if (plan.tune) {
      Mat ref01 = st.prev_modes.leftCols(2);
      TuneResult tr = tune_drive_frequency(prop, eps, omega, ref01, plan.phase,
                                           plan.prop, plan.tune_cfg);
      omega = tr.omega;
      U = std::move(tr.propagator);
      fm = std::move(tr.modes);
      pt.tune_iterations = tr.iterations;
      pt.tune_residual = tr.residual;
    } else {
      U = prop.one_period(eps, omega, plan.phase, plan.prop);
      fm = floquet_decompose(U, omega, plan.prop.unitarity_tol);
    }
    pt.omega_d = omega;
    pt.n_cluster_fixes = fm.n_cluster_fixes;

    detail::align_clusters(fm, st.prev_modes, omega);

    // optimal-assignment continuity: weight = |<prev_r|new_c>|^2
    Mat ov = st.prev_modes.adjoint() * fm.modes;
    RMat w = ov.cwiseAbs2();
    std::vector<int> perm = max_weight_assignment(w);

    Mat modes(d, d);
    pt.quasi.resize(d);
    for (Eigen::Index b = 0; b < d; ++b) {
      const int c = perm[static_cast<size_t>(b)];
      modes.col(b) = fm.modes.col(c);
      pt.quasi(b) = fm.quasi(c);
    }
    gauge_fix_columns(modes);

    pt.fidelity.resize(d);
    pt.foreign.resize(d);
    pt.partner.assign(static_cast<size_t>(d), -1);
    for (Eigen::Index b = 0; b < d; ++b) {
      const int c = perm[static_cast<size_t>(b)];
      pt.fidelity(b) = std::sqrt(w(b, c));
      double best = -1;
      int who = -1;
      for (Eigen::Index r = 0; r < d; ++r) {
        if (r == b) continue;
        if (w(r, c) > best) { best = w(r, c); who = static_cast<int>(r); }
      }
      pt.foreign(b) = best > 0 ? std::sqrt(best) : 0.0;
      pt.partner[static_cast<size_t>(b)] = who;
      if (pt.fidelity(b) < plan.fid_floor)
        pt.lost.push_back(static_cast<int>(b));
    }

    // unfold quasienergy offsets by nearest-integer continuation
    pt.unfolded.resize(d);
    for (Eigen::Index b = 0; b < d; ++b) {
      const double delta = pt.quasi(b) - pt.quasi(0);
      const double n = std::round((st.prev_unfolded(b) - delta) / omega);
      pt.unfolded(b) = delta + n * omega;
    }

    if (plan.num_op.size() > 0)
      pt.photons = (modes.adjoint() * plan.num_op * modes).diagonal().real();

    std::vector<Mat> samples;
    if (on_point && plan.micromotion)
      prop.micromotion(eps, omega, plan.phase, modes, pt.quasi, plan.prop,
                       samples);

    st.prev_modes = std::move(modes);
    st.prev_unfolded = pt.unfolded;
    st.omega = omega;
    st.next = ip + 1;

    out.points.push_back(std::move(pt));
    if (on_point)
      on_point(FloquetPointFull{out.points.back(), st.prev_modes, samples});
  }
  return out;
}

// Refold the unfolded offsets modulo omega_d/2 into [0, omega_d/2) -- the
// spectral-kissing representation.  Row = point, column = branch.
inline RMat kissing_transform(const FloquetBranchSet& bs) {
  KC_REQUIRE(!bs.points.empty(), "kissing_transform: empty branch set");
  const Eigen::Index n = bs.points.front().unfolded.size();
  RMat out(static_cast<Eigen::Index>(bs.points.size()), n);
  for (std::size_t p = 0; p < bs.points.size(); ++p) {
    const auto& pt = bs.points[p];
    const double half = 0.5 * pt.omega_d;
    for (Eigen::Index b = 0; b < n; ++b) {
      const double u = pt.unfolded(b);
      out(static_cast<Eigen::Index>(p), b) = u - half * std::floor(u / half);
    }
  }
  return out;
}

struct KissEvent {
  int branch_a = 0, branch_b = 0;
  std::size_t point = 0;  // index into the branch set's points
  double eps_d = 0;       // onset amplitude
};

struct CrossingEvent {
  int branch = 0, partner = -1;
  std::size_t point = 0;
  double eps_d = 0;
  double fidelity = 0;
};

struct EventReport {
  std::vector<KissEvent> kisses;
  std::vector<CrossingEvent> crossings;
};

// Kiss event: first amplitude where a branch pair's refolded gap drops below
// kiss_tol and stays below for the rest of the sweep.  Pairs already inside
// the tolerance at the first point (the tuned pair (0,1) by construction,
// and exactly degenerate bare pairs) have no onset and are not reported.
// Crossing event: a local minimum of tracking fidelity below fid_tol,
// tagged with the partner branch that absorbed the overlap.
inline EventReport detect_events(const FloquetBranchSet& bs,
                                 double kiss_tol = khz(100.0),
                                 double fid_tol = 0.99, int branch_cut = 12) {
  EventReport out;
  if (bs.points.empty()) return out;
  const auto np = bs.points.size();
  const RMat refolded = kissing_transform(bs);
  const int nb = std::min<int>(branch_cut, static_cast<int>(refolded.cols()));

  for (int a = 0; a < nb; ++a) {
    for (int b = a + 1; b < nb; ++b) {
      // latest point with gap at or above tolerance
      std::ptrdiff_t last_open = -1;
      for (std::size_t p = 0; p < np; ++p) {
        const double half = 0.5 * bs.points[p].omega_d;
        const double gap = circular_distance(
            refolded(static_cast<Eigen::Index>(p), a),
            refolded(static_cast<Eigen::Index>(p), b), half);
        if (gap >= kiss_tol) last_open = static_cast<std::ptrdiff_t>(p);
      }
      if (last_open + 1 >= static_cast<std::ptrdiff_t>(np)) continue;  // never closes
      if (last_open < 0) continue;  // closed from the start: no onset
      const auto onset = static_cast<std::size_t>(last_open + 1);
      out.kisses.push_back(
          KissEvent{a, b, onset, bs.points[onset].eps_d});
    }
  }

  for (int b = 0; b < nb; ++b) {
    for (std::size_t p = 0; p < np; ++p) {
      const double f = bs.points[p].fidelity(b);
      if (f >= fid_tol) continue;
      const bool down = p == 0 || bs.points[p - 1].fidelity(b) > f;
      const bool up = p + 1 == np || bs.points[p + 1].fidelity(b) >= f;
      if (down && up)
        out.crossings.push_back(CrossingEvent{
            b, bs.points[p].partner[static_cast<size_t>(b)], p,
            bs.points[p].eps_d, f});
    }
  }
  return out;
}

}  // namespace kerrcat::floquet
