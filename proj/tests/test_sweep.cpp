#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "kerrcat/circuit/single_mode.hpp"
#include "kerrcat/floquet/sweep.hpp"
#include "kerrcat/units.hpp"

using namespace kerrcat;
using namespace kerrcat::circuit;
using namespace kerrcat::floquet;

namespace {

struct SmallSystem {
  SpectralData sd;
  RVec E;
  SmallSystem() {
    CircuitSpec spec;
    spec.E_J = ghz(272.436);
    spec.E_C = mhz(107.8);
    spec.alpha = 0.046;
    spec.phi_ext = 0.33 * two_pi;
    HilbertConfig hc;
    hc.n_fock = 60;
    hc.n_keep = 24;
    sd = build_single_mode(spec, hc);
    E = sd.energies.array() - sd.energies(0);
  }
  SplitPropagator propagator() const { return SplitPropagator(E, sd.n_op); }
  SweepPlan plan() const {
    SweepPlan p;
    p.amplitudes = RVec::LinSpaced(11, 0.0, ghz(0.1));
    p.prop.n_samples = 128;
    p.prop.oversample = 2;
    p.num_op = sd.num_op;
    return p;
  }
};

}  // namespace

TEST_CASE("tuned sweep pins the qubit splitting at half the drive frequency",
          "[sweep]") {
  SmallSystem sys;
  SplitPropagator prop = sys.propagator();
  SweepPlan plan = sys.plan();
  FloquetBranchSet bs = sweep(prop, plan);
  REQUIRE(bs.points.size() == 11);

  for (const auto& p : bs.points) {
    const double split = p.quasi(1) - p.quasi(0);
    CHECK(circular_distance(split, 0.5 * p.omega_d, p.omega_d) <
          plan.tune_cfg.tol);
    CHECK(p.tune_iterations <= 5);
    CHECK(p.fidelity.minCoeff() > 0.999);
    CHECK(p.lost.empty());
  }

  // undriven point: the tuner lands on exactly twice the qubit frequency
  CHECK(std::abs(bs.points.front().omega_d - 2.0 * sys.E(1)) <
        plan.tune_cfg.tol);
  CHECK(to_hz(bs.points.front().omega_d) / 1e9 ==
        Catch::Approx(12.184958940).epsilon(1e-9));

  // ac-Stark drift of the tuned frequency over 0 -> 0.1 GHz
  const double drift = bs.points.back().omega_d - bs.points.front().omega_d;
  CHECK(drift < -khz(6.0));
  CHECK(drift > -khz(9.0));

  SECTION("events are absent on this monotone isolated stretch") {
    EventReport ev = detect_events(bs);
    CHECK(ev.kisses.empty());
    CHECK(ev.crossings.empty());
  }
}

TEST_CASE("zero-amplitude point reproduces bare offsets after refolding",
          "[sweep]") {
  SmallSystem sys;
  SplitPropagator prop = sys.propagator();
  FloquetBranchSet bs = sweep(prop, sys.plan());

  const auto& p0 = bs.points.front();
  for (int b = 0; b < 8; ++b)
    CHECK(std::abs(p0.unfolded(b) - sys.E(b)) < 1e-9 * std::max(1.0, sys.E(b)));

  RMat kt = kissing_transform(bs);
  const double half = 0.5 * p0.omega_d;
  for (int b = 0; b < 8; ++b) {
    const double bare = sys.E(b);
    const double refold = bare - half * std::floor(bare / half);
    CHECK(std::abs(kt(0, b) - refold) < 1e-12 * p0.omega_d);
  }
}

TEST_CASE("photon numbers track the branch character and grow with drive",
          "[sweep]") {
  SmallSystem sys;
  SplitPropagator prop = sys.propagator();
  FloquetBranchSet bs = sweep(prop, sys.plan());

  CHECK(bs.points.front().photons(0) < 0.05);
  CHECK(bs.points.front().photons(1) == Catch::Approx(1.0).margin(0.1));
  CHECK(bs.points.back().photons(0) > 0.1);
  CHECK(bs.points.back().photons(0) < 0.25);
  CHECK(bs.points.back().photons(1) > 1.0);
  CHECK(bs.points.back().photons(1) < 1.12);
  for (size_t p = 1; p < bs.points.size(); ++p)
    CHECK(bs.points[p].photons(0) > bs.points[p - 1].photons(0) - 1e-9);
}

TEST_CASE("checkpointed state resumes into the identical sweep", "[sweep]") {
  SmallSystem sys;
  SplitPropagator prop = sys.propagator();
  SweepPlan plan = sys.plan();
  FloquetBranchSet full = sweep(prop, plan);

  SweepState st;
  SweepPlan head = plan;
  head.amplitudes = plan.amplitudes.head(6);
  FloquetBranchSet part1 = sweep(prop, head, &st);
  REQUIRE(st.next == 6);
  FloquetBranchSet part2 = sweep(prop, plan, &st);
  REQUIRE(part2.first_point == 6);
  REQUIRE(part2.points.size() == 5);

  for (size_t k = 0; k < part2.points.size(); ++k) {
    const auto& a = full.points[6 + k];
    const auto& b = part2.points[k];
    CHECK(a.omega_d == b.omega_d);
    CHECK((a.quasi - b.quasi).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((a.unfolded - b.unfolded).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((a.fidelity - b.fidelity).cwiseAbs().maxCoeff() < 1e-13);
  }

  SECTION("a state from a different system is rejected") {
    SweepState bad = st;
    bad.prev_modes = Mat::Identity(7, 7);
    bad.next = 3;
    REQUIRE_THROWS_AS(sweep(prop, plan, &bad), kerrcat::error);
  }
}

TEST_CASE("fixed-frequency mode skips tuning and the splitting drifts",
          "[sweep]") {
  SmallSystem sys;
  SplitPropagator prop = sys.propagator();
  SweepPlan plan = sys.plan();
  plan.tune = false;
  plan.omega_fixed = 2.0 * sys.E(1);
  FloquetBranchSet bs = sweep(prop, plan);

  for (const auto& p : bs.points) {
    CHECK(p.omega_d == plan.omega_fixed);
    CHECK(p.tune_iterations == 0);
  }
  const auto& last = bs.points.back();
  const double res = circular_distance(last.quasi(1) - last.quasi(0),
                                       0.5 * last.omega_d, last.omega_d);
  CHECK(res > khz(2.0));   // untuned: ac-Stark pulls the pair off degeneracy
  CHECK(res < khz(20.0));
}

TEST_CASE("micromotion samples reach the point callback on request", "[sweep]") {
  SmallSystem sys;
  SplitPropagator prop = sys.propagator();
  SweepPlan plan = sys.plan();
  plan.amplitudes = RVec::LinSpaced(2, 0.0, ghz(0.05));
  plan.prop.n_samples = 32;
  plan.micromotion = true;

  // branch 0 sits at quasienergy zero, so its folded mode is genuinely
  // stationary at zero drive; higher branches fold with k-photon phases
  std::vector<size_t> counts;
  std::vector<double> dev0;
  sweep(prop, plan, nullptr, [&](const FloquetPointFull& pt) {
    counts.push_back(pt.samples.size());
    double d = 0;
    for (const auto& s : pt.samples)
      d = std::max(d, (s.col(0) - pt.modes_t0.col(0)).cwiseAbs().maxCoeff());
    dev0.push_back(d);
  });
  REQUIRE(counts == std::vector<size_t>{32, 32});
  CHECK(dev0[0] < 1e-9);   // undriven: stationary
  CHECK(dev0[1] > 1e-3);   // driven: genuine micromotion

  SECTION("no callback, no samples requested: sweep still runs") {
    plan.micromotion = false;
    FloquetBranchSet bs = sweep(prop, plan);
    CHECK(bs.points.size() == 2);
  }
}

TEST_CASE("sweep plan and tuner guards", "[sweep]") {
  SmallSystem sys;
  SplitPropagator prop = sys.propagator();

  SweepPlan plan = sys.plan();
  plan.amplitudes(3) = plan.amplitudes(5);  // not strictly ascending
  REQUIRE_THROWS_AS(sweep(prop, plan), kerrcat::error);

  plan = sys.plan();
  plan.tune = false;  // no omega_fixed
  REQUIRE_THROWS_AS(sweep(prop, plan), kerrcat::error);

  plan = sys.plan();
  plan.num_op = Mat::Identity(5, 5);
  REQUIRE_THROWS_AS(sweep(prop, plan), kerrcat::error);

  SECTION("starved tuner hands back its best iterate with the residual") {
    TuneConfig tc;
    tc.tol = from_hz(1.0);  // sub-Hz target, unreachable in one step
    tc.stall_rtol = 0.0;    // and no stall acceptance either
    tc.max_iter = 1;
    Mat ref01 = Mat::Identity(24, 24).leftCols(2);
    PropagatorConfig pc;
    pc.n_samples = 128;
    pc.oversample = 2;
    TuneResult tr = tune_drive_frequency(prop, ghz(0.1), 2.0 * sys.E(1), ref01,
                                         0.0, pc, tc);
    CHECK(tr.iterations == 1);
    CHECK(tr.residual > from_hz(1.0));
    CHECK(tr.propagator.rows() == 24);
    CHECK(tr.modes.quasi.size() == 24);
  }

  SECTION("unreachable tolerance still ends at the method's floor") {
    TuneConfig tc;
    tc.tol = 0.0;  // never satisfied directly; stall/best-effort must exit
    Mat ref01 = Mat::Identity(24, 24).leftCols(2);
    PropagatorConfig pc;
    pc.n_samples = 128;
    pc.oversample = 2;
    TuneResult tr = tune_drive_frequency(prop, ghz(0.05), 2.0 * sys.E(1),
                                         ref01, 0.0, pc, tc);
    CHECK(tr.residual < khz(1.0));
  }

  SECTION("degenerate reference columns are rejected") {
    Mat ref = Mat::Zero(24, 2);
    ref.col(0)(0) = 1.0;
    ref.col(1)(0) = 1.0;  // same state twice
    PropagatorConfig pc;
    pc.n_samples = 128;
    REQUIRE_THROWS_AS(
        tune_drive_frequency(prop, ghz(0.05), 2.0 * sys.E(1), ref, 0.0, pc, {}),
        kerrcat::error);
  }
}
