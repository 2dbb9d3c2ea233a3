#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <complex>
#include <map>
#include <vector>

#include "kerrcat/circuit/potential.hpp"
#include "kerrcat/circuit/single_mode.hpp"
#include "kerrcat/floquet/sweep.hpp"
#include "kerrcat/lindblad/transitions.hpp"
#include "kerrcat/perturbation/buffer_scan.hpp"
#include "kerrcat/perturbation/displaced_frame.hpp"
#include "kerrcat/perturbation/matrix_elements.hpp"
#include "kerrcat/units.hpp"

using namespace kerrcat;
using namespace kerrcat::circuit;
using namespace kerrcat::perturbation;
using Catch::Approx;

namespace {

// Taylor-frame coefficients of the flux-biased circuit every check runs on.
const TaylorFrame& frame() {
  static TaylorFrame tf = taylor_coefficients(ghz(272.436), mhz(107.8), 0.046,
                                              0.33 * two_pi, 6);
  return tf;
}

DisplacedFrameParams params_at(double eps_d, double omega_d) {
  const TaylorFrame& tf = frame();
  return displaced_frame_params(tf.omega0, tf.g[3], tf.g[4], tf.phi_zpf, eps_d,
                                omega_d);
}

// Fixed point of omega_d = 2 (omega_0 + Delta(Pi(omega_d))): the drive
// frequency at which the frame Hamiltonian has no residual linear term.
SqueezedKerrSpectrum zero_detuned_point(double eps_d, int dim) {
  const TaylorFrame& tf = frame();
  double wd = 2.0 * tf.omega0;
  DisplacedFrameParams p;
  for (int it = 0; it < 60; ++it) {
    p = params_at(eps_d, wd);
    const double next = 2.0 * (tf.omega0 + p.detuning);
    if (std::abs(next - wd) < 1e-9) {
      wd = next;
      break;
    }
    wd = next;
  }
  p = params_at(eps_d, wd);
  return diagonalize_displaced_frame(p, dim);
}

Mat lowering(int dim) {
  Mat a = Mat::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

}  // namespace

TEST_CASE("displacement coefficient follows the linear response of the mode",
          "[perturbation]") {
  const TaylorFrame& tf = frame();
  const double wd = 2.0 * tf.omega0;

  // at this drive the denominator is negative real, so the amplitude is +i|Pi|
  const cplx Pi = displacement_coefficient(ghz(2.5), wd, tf.omega0, tf.phi_zpf);
  CHECK(Pi.real() == Approx(0.0).margin(1e-12));
  CHECK(Pi.imag() == Approx(0.514041).epsilon(1e-4));

  const cplx expect = ghz(2.5) * wd /
                      (cplx(0, 2.0) * tf.phi_zpf *
                       (tf.omega0 * tf.omega0 - wd * wd));
  CHECK(std::abs(Pi - expect) < 1e-12 * std::abs(Pi));

  // a phase delay rotates the amplitude without changing its size
  const cplx rot =
      displacement_coefficient(ghz(2.5), wd, tf.omega0, tf.phi_zpf, 0.8);
  CHECK(std::abs(rot) == Approx(std::abs(Pi)).epsilon(1e-12));
  CHECK(std::arg(rot / Pi) == Approx(-0.8).epsilon(1e-10));

  REQUIRE_THROWS_AS(
      displacement_coefficient(ghz(2.5), tf.omega0, tf.omega0, tf.phi_zpf),
      kerrcat::error);
}

TEST_CASE("frame parameters reduce to the known limits", "[perturbation]") {
  const TaylorFrame& tf = frame();
  const double wd = 2.0 * tf.omega0;

  SECTION("zero drive keeps the static anharmonic ladder") {
    auto p = params_at(0.0, wd);
    CHECK(std::abs(p.Pi) == 0.0);
    CHECK(std::abs(p.eps2) == 0.0);
    CHECK(p.drive_shift == 0.0);
    const double d0 =
        3.0 * tf.g[4] - 20.0 * tf.g[3] * tf.g[3] / (3.0 * tf.omega0);
    CHECK(p.detuning == Approx(d0).epsilon(1e-12));
    CHECK(p.detuning / mhz(1) == Approx(-2.3715).epsilon(1e-3));
    CHECK(p.kerr / mhz(1) == Approx(1.1857).epsilon(1e-3));
  }

  SECTION("pure quartic mode has Kerr 3|g4|/2") {
    auto p = displaced_frame_params(tf.omega0, 0.0, tf.g[4], tf.phi_zpf,
                                    ghz(1.0), wd);
    CHECK(p.kerr == Approx(1.5 * std::abs(tf.g[4])).epsilon(1e-12));
  }

  SECTION("two-photon amplitude is the cubic coupling times the displacement") {
    for (double e : {0.1, 1.0, 2.5}) {
      auto p = params_at(ghz(e), wd);
      CHECK(std::abs(p.eps2 - tf.g[3] * p.Pi) < 1e-14 * std::abs(p.eps2));
    }
  }

  SECTION("uniform drive shift at twice the mode frequency") {
    auto p = params_at(ghz(0.5), wd);
    CHECK(p.drive_shift ==
          Approx(0.375 * tf.omega0 * std::norm(p.Pi)).epsilon(1e-12));
  }

  SECTION("overdriven displacement is rejected") {
    REQUIRE_THROWS_AS(params_at(ghz(6.0), wd), kerrcat::error);
  }
}

TEST_CASE("effective Hamiltonian carries its defining coefficients",
          "[perturbation]") {
  auto p = params_at(ghz(1.5), 2.0 * frame().omega0);
  const int dim = 8;
  Mat H = effective_hamiltonian_matrix(p, dim);
  const double lin = p.omega_0 - 0.5 * p.omega_d + p.detuning;

  REQUIRE(H.rows() == dim);
  CHECK(std::abs((H - H.adjoint()).norm()) < 1e-12 * H.norm());
  for (int n = 0; n < dim; ++n)
    CHECK(H(n, n).real() ==
          Approx(lin * n - p.kerr * n * (n - 1)).margin(1e-6));
  for (int n = 0; n + 2 < dim; ++n) {
    const double s = std::sqrt(double(n + 1) * double(n + 2));
    CHECK(std::abs(H(n + 2, n) - p.eps2 * s) < 1e-12 * std::abs(p.eps2) * s);
  }
  CHECK(std::abs(H(3, 0)) == 0.0);

  REQUIRE_THROWS_AS(effective_hamiltonian_matrix(p, 3), kerrcat::error);
}

TEST_CASE("zero-detuned doublet is exactly degenerate, excited splitting dies",
          "[perturbation]") {
  struct Row {
    double eps_ghz, a2, split23_rel;
  };
  // excited-pair splittings frozen from the calibration run
  const Row rows[] = {{1.9, 8.043, 5.94e-4},
                      {2.5, 10.584, 7.05e-6},
                      {3.0, 12.702, 1.54e-7}};
  for (const Row& r : rows) {
    auto sk = zero_detuned_point(ghz(r.eps_ghz), 90);
    const TaylorFrame& tf = frame();
    const double lin = tf.omega0 + sk.params.detuning - 0.5 * sk.params.omega_d;
    REQUIRE(std::abs(lin) < 1.0);  // fixed point converged (rad/s)

    const double e2 = std::abs(sk.params.eps2);
    CHECK(std::abs(sk.energies(0) - sk.energies(1)) / e2 < 1e-10);
    CHECK(std::abs(sk.energies(2) - sk.energies(3)) / e2 ==
          Approx(r.split23_rel).epsilon(0.2));
    CHECK(e2 / sk.params.kerr == Approx(r.a2).epsilon(1e-3));

    // the top pair is a two-branch coherent doublet: <0|a|1> has size alpha
    Mat a = lowering(sk.dim);
    const cplx alpha = sk.states.col(0).dot(a * sk.states.col(1));
    CHECK(std::norm(alpha) == Approx(e2 / sk.params.kerr).epsilon(1e-3));
  }
}

TEST_CASE("lab folding conventions", "[perturbation]") {
  const double wd = ghz(12.0);
  CHECK(fold_to_lab(0.0, 0, wd) == Approx(0.0).margin(1e-9));
  CHECK(fold_to_lab(wd, 0, wd) == Approx(0.0).margin(1e-9));
  CHECK(fold_to_lab(0.3 * wd, 1, wd) == Approx(-0.2 * wd).epsilon(1e-12));
  CHECK(fold_to_lab(-0.1 * wd, 1, wd) == Approx(-0.1 * wd).epsilon(1e-12));
  CHECK(fold_to_lab(0.6 * wd, 0, wd) == Approx(-0.4 * wd).epsilon(1e-12));
  REQUIRE_THROWS_AS(fold_to_lab(0.0, 2, wd), kerrcat::error);
}

TEST_CASE("folded frame spectrum tracks the exact Floquet branches",
          "[perturbation]") {
  const TaylorFrame& tf = frame();
  CircuitSpec spec;
  spec.E_J = ghz(272.436);
  spec.E_C = mhz(107.8);
  spec.alpha = 0.046;
  spec.phi_ext = 0.33 * two_pi;
  HilbertConfig hc;
  hc.n_fock = 60;
  hc.n_keep = 24;
  SpectralData sd = build_single_mode(spec, hc);
  RVec E = (sd.energies.array() - sd.energies(0)).matrix();
  floquet::SplitPropagator prop(E, sd.n_op);

  floquet::SweepPlan plan;
  plan.amplitudes = RVec::LinSpaced(11, 0.0, ghz(0.5));
  plan.prop.n_samples = 128;
  plan.prop.oversample = 2;
  std::map<int, std::pair<double, RVec>> pts;
  int idx = 0;
  floquet::sweep(prop, plan, nullptr,
                 [&](const floquet::FloquetPointFull& f) {
                   pts[idx++] = {f.summary.omega_d, f.summary.quasi};
                 });

  double worst = 0;
  for (int i : {0, 2, 5, 10}) {
    const auto& [wd, quasi] = pts.at(i);
    auto p = params_at(plan.amplitudes(i), wd);
    auto sk = diagonalize_displaced_frame(p, 60);
    RVec lab = lab_quasienergies(sk);
    for (int mu = 0; mu <= 5; ++mu) {
      const double d = circular_distance(lab(mu), quasi(mu), 0.5 * wd);
      worst = std::max(worst, d);
      CHECK(d < 5.0 * p.kerr);  // agreement bound for the low branches
    }
  }
  CHECK(worst < mhz(0.5));  // calibrated: 0.195 MHz worst over this grid

  // second-order qubit frequency against the exact splitting
  auto p0 = params_at(0.0, pts.at(0).first);
  CHECK(std::abs(tf.omega0 + p0.detuning - E(1)) < khz(5.0));
}

TEST_CASE("transition phases sort into the expected harmonic pattern",
          "[perturbation]") {
  auto sk = zero_detuned_point(ghz(2.5), 80);
  const double half = 0.5 * sk.params.omega_d;
  const struct {
    int mu, nu, j;
  } expected[] = {{0, 1, -1}, {1, 0, 1}, {2, 1, -1}, {3, 0, 1},
                  {2, 0, 0},  {3, 1, 0}, {2, 3, -1}, {3, 2, 1}};
  for (const auto& e : expected)
    CHECK(theta_munu(sk, e.mu, e.nu) / half ==
          Approx(double(e.j)).margin(1e-6));
}

TEST_CASE("quadrature harmonics obey the reflection identities",
          "[perturbation]") {
  auto sk = zero_detuned_point(ghz(2.5), 60);
  const auto& p = sk.params;
  CHECK(quadrature_harmonic(0, p, 24).norm() == 0.0);
  for (int n = 1; n <= 4; ++n) {
    Mat pn = quadrature_harmonic(n, p, 24);
    Mat pm = quadrature_harmonic(-n, p, 24);
    CHECK((pm - pn.adjoint()).norm() < 1e-14 * std::max(1.0, pn.norm()));
  }
  REQUIRE_THROWS_AS(quadrature_harmonic(5, p, 24), kerrcat::error);
}

TEST_CASE("matrix-element identities in the kissing regime", "[perturbation]") {
  auto sk = zero_detuned_point(ghz(2.5), 80);
  const auto& p = sk.params;

  const cplx x010 = analytic_x(sk, 0, 1, 0);
  const cplx x101 = analytic_x(sk, 1, 0, 1);
  const cplx x210 = analytic_x(sk, 2, 1, 0);
  const cplx x301 = analytic_x(sk, 3, 0, 1);

  // the two images of the qubit transition carry equal weight
  CHECK(std::abs(x010) == Approx(std::abs(x101)).epsilon(1e-4));
  CHECK(std::abs(x010) == Approx(3.259997).epsilon(1e-3));

  // and that weight is the coherent-amplitude form of the first harmonic
  const cplx alpha_c = std::sqrt(p.eps2 / p.kerr);
  const cplx form = cplx(0, 1) * std::conj(alpha_c) +
                    (cplx(0, 2.0) * p.g3 / p.omega_d) * std::conj(p.Pi) *
                        alpha_c;
  CHECK(std::abs(x010) == Approx(std::abs(form)).epsilon(1e-3));

  // excited-to-cat elements approach unit weight near the kissing
  CHECK(std::abs(x210) == Approx(0.9725).epsilon(1e-2));
  CHECK(std::abs(x301) == Approx(std::abs(x210)).epsilon(1e-4));

  // the interwell element grows linearly with the cat amplitude
  Mat a = lowering(sk.dim);
  const cplx alpha = sk.states.col(0).dot(a * sk.states.col(1));
  const cplx x201 = analytic_x(sk, 2, 0, 1);
  const cplx expect201 =
      cplx(0, 8.0) * p.g3 * std::conj(alpha) / (3.0 * p.omega_0);
  CHECK(std::abs(x201) / std::abs(expect201) == Approx(0.924).epsilon(0.02));
  CHECK(std::abs(analytic_x(sk, 3, 1, 1)) ==
        Approx(std::abs(x201)).epsilon(1e-3));

  auto sk2 = zero_detuned_point(ghz(3.2), 80);
  const cplx alpha2 = sk2.states.col(0).dot(lowering(80) * sk2.states.col(1));
  const double growth = std::abs(analytic_x(sk2, 2, 0, 1)) / std::abs(x201);
  CHECK(growth > 1.0);
  CHECK(growth == Approx(std::abs(alpha2 / alpha)).epsilon(0.05));
}

TEST_CASE("frame matrix elements match the exact micromotion harmonics",
          "[perturbation]") {
  const TaylorFrame& tf = frame();
  CircuitSpec spec;
  spec.E_J = ghz(272.436);
  spec.E_C = mhz(107.8);
  spec.alpha = 0.046;
  spec.phi_ext = 0.33 * two_pi;
  HilbertConfig hc;
  hc.n_fock = 60;
  hc.n_keep = 24;
  SpectralData sd = build_single_mode(spec, hc);
  RVec E = (sd.energies.array() - sd.energies(0)).matrix();
  floquet::SplitPropagator prop(E, sd.n_op);

  floquet::SweepPlan plan;
  plan.amplitudes = RVec::LinSpaced(3, 0.0, ghz(0.05));
  plan.prop.n_samples = 128;
  plan.prop.oversample = 2;
  plan.micromotion = true;
  double wd = 0;
  RVec quasi;
  std::vector<Mat> samples;
  floquet::sweep(prop, plan, nullptr,
                 [&](const floquet::FloquetPointFull& f) {
                   wd = f.summary.omega_d;
                   quasi = f.summary.quasi;
                   samples = f.samples;
                 });

  lindblad::XTensor X =
      lindblad::fourier_matrix_elements(samples, sd.n_op / tf.n_zpf, 6);
  auto p = params_at(ghz(0.05), wd);
  auto sk = diagonalize_displaced_frame(p, 60);

  const struct {
    int mu, nu, k;
    double mag;  // frozen analytic magnitude
  } cases[] = {{0, 1, -1, 1.00740}, {1, 0, 0, 0.20934}, {0, 1, 0, 0.20934},
               {1, 0, 1, 1.00740},  {2, 1, 0, 1.40225}};
  for (const auto& c : cases) {
    const cplx eng = X.at(c.k)(c.mu, c.nu);
    // reconstruct which frame harmonic this zone transition samples
    const double th =
        (quasi(c.nu) - quasi(c.mu)) + (sk.energies(c.mu) - sk.energies(c.nu));
    const int n = 2 * c.k - int(std::lround(th / (0.5 * wd)));
    REQUIRE(std::abs(n) <= 4);
    const cplx ana = analytic_matrix_element(sk, c.mu, c.nu, n);
    CHECK(std::abs(ana) == Approx(c.mag).epsilon(1e-3));
    CHECK(std::abs(eng) == Approx(std::abs(ana)).epsilon(1e-2));
  }
}

TEST_CASE("buffer coupling order scan", "[perturbation]") {
  const TaylorFrame& tf = frame();
  auto sk = zero_detuned_point(ghz(3.4), 140);

  auto scan = buffer_coupling_order_scan(sk, tf.phi_zpf, sk.params.Pi);
  REQUIRE(scan.k == std::vector<int>{1, 2, 3, 4, 5});
  const double frozen[] = {1.871e-1, 3.904e-1, 2.781e-1, 1.157e-1, 3.600e-2};
  for (int i = 0; i < 5; ++i)
    CHECK(scan.magnitude(i) == Approx(frozen[i]).epsilon(1e-2));
  CHECK(scan.argmax_k == 2);

  SECTION("without a displacement only the lowest order survives") {
    auto scan0 = buffer_coupling_order_scan(sk, tf.phi_zpf, 0.0);
    CHECK(scan0.magnitude(0) == Approx(frozen[0]).epsilon(1e-2));
    for (int i = 1; i < 5; ++i) CHECK(scan0.magnitude(i) == 0.0);
    CHECK(scan0.argmax_k == 1);
  }

  SECTION("doubling the zero-point spread scales order k by 2^(3k-2)") {
    auto scan2 = buffer_coupling_order_scan(sk, 2.0 * tf.phi_zpf, sk.params.Pi);
    CHECK(scan2.magnitude(2) / scan.magnitude(2) == Approx(128.0).epsilon(1e-9));
    CHECK(scan2.magnitude(0) / scan.magnitude(0) == Approx(2.0).epsilon(1e-9));
  }

  SECTION("a basis too small for the target states is rejected") {
    auto small = diagonalize_displaced_frame(sk.params, 30);
    REQUIRE_THROWS_AS(buffer_coupling_order_scan(small, tf.phi_zpf,
                                                 sk.params.Pi),
                      kerrcat::error);
  }
}
