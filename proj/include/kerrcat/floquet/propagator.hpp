#pragma once
#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "kerrcat/common.hpp"
#include "kerrcat/linalg.hpp"

namespace kerrcat::floquet {

struct PropagatorConfig {
  int n_samples = 256;   // micromotion samples per period (power of two)
  int oversample = 4;    // composition macro-steps per sample interval
  double unitarity_tol = 1e-9;
  double periodicity_tol = 1e-7;

  void validate() const {
    KC_REQUIRE(n_samples >= 4 && (n_samples & (n_samples - 1)) == 0,
               "PropagatorConfig: n_samples must be a power of two >= 4");
    KC_REQUIRE(oversample >= 1, "PropagatorConfig: oversample must be >= 1");
  }
};

// One-period propagator for H(t) = diag(E) + eps cos(omega t + phase) * N by
// operator splitting.  The static part is applied as exact diagonal phases;
// the drive kick is applied exactly in the eigenbasis of N.  Each macro step
// is a fourth-order (triple-jump) composition of midpoint-sampled Strang
// splits, with time treated as an augmented coordinate so the composition
// order survives the explicit time dependence.
class SplitPropagator {
 public:
  SplitPropagator(RVec energies, const Mat& drive_op)
      : E_(std::move(energies)) {
    const auto d = E_.size();
    KC_REQUIRE(drive_op.rows() == d && drive_op.cols() == d,
               "SplitPropagator: drive operator dimension mismatch");
    KC_REQUIRE(max_abs(drive_op - drive_op.adjoint()) <=
                   1e-10 * std::max(1.0, max_abs(drive_op)),
               "SplitPropagator: drive operator must be Hermitian");
    EigHerm es = eig_herm(hermitize(drive_op));
    lam_ = std::move(es.values);
    P_ = std::move(es.vectors);
    Padj_ = P_.adjoint();
  }

  int dim() const { return static_cast<int>(E_.size()); }
  const RVec& energies() const { return E_; }

  Mat one_period(double eps, double omega, double phase,
                 const PropagatorConfig& cfg) const {
    Mat U = run(eps, omega, phase, cfg, nullptr, nullptr);
    const double res = unitarity_residual(U);
    KC_REQUIRE(res < cfg.unitarity_tol,
               "SplitPropagator: unitarity violated beyond tolerance");
    return U;
  }

  // Floquet-mode samples |phi_mu(t_j)> = e^{i eps_mu t_j} U(t_j) |phi_mu(0)>
  // at t_j = j T / n_samples, j = 0 .. n_samples-1.  phi0 holds the t = 0
  // modes column-wise and quasi their quasienergies.  Also returns U(T) so a
  // sweep that wants both pays for a single propagation.
  Mat micromotion(double eps, double omega, double phase, const Mat& phi0,
                  const RVec& quasi, const PropagatorConfig& cfg,
                  std::vector<Mat>& samples) const {
    KC_REQUIRE(phi0.rows() == E_.size(),
               "SplitPropagator: mode matrix dimension mismatch");
    KC_REQUIRE(quasi.size() == phi0.cols(),
               "SplitPropagator: one quasienergy per mode required");
    const double T = 2.0 * M_PI / omega;
    samples.assign(static_cast<size_t>(cfg.n_samples), Mat());
    samples[0] = phi0;
    SampleHook record = [&](int j, const Mat& U) {
      if (j == 0) return;  // U(0) = 1
      const double t = T * j / cfg.n_samples;
      Mat s = U * phi0;
      for (Eigen::Index c = 0; c < s.cols(); ++c)
        s.col(c) *= std::exp(I * quasi(c) * t);
      if (j < cfg.n_samples) samples[static_cast<size_t>(j)] = std::move(s);
      else {  // j == n_samples: closure of the period
        const double res = (s - phi0).cwiseAbs().maxCoeff();
        KC_REQUIRE(res < cfg.periodicity_tol,
                   "SplitPropagator: micromotion not periodic; integrator "
                   "tolerance too loose");
      }
    };
    Mat U = run(eps, omega, phase, cfg, &record, nullptr);
    const double res = unitarity_residual(U);
    KC_REQUIRE(res < cfg.unitarity_tol,
               "SplitPropagator: unitarity violated beyond tolerance");
    return U;
  }

 private:
  using SampleHook = std::function<void(int, const Mat&)>;

  // Advance U(0) = 1 over one period; invoke hook at every sample boundary
  // including the final time (index n_samples).
  Mat run(double eps, double omega, double phase, const PropagatorConfig& cfg,
          const SampleHook* hook, void*) const {
    cfg.validate();
    KC_REQUIRE(omega > 0, "SplitPropagator: omega must be positive");
    KC_REQUIRE(eps >= 0, "SplitPropagator: eps must be nonnegative");
    const Eigen::Index d = E_.size();
    const double T = 2.0 * M_PI / omega;
    const int n_macro = cfg.n_samples * cfg.oversample;
    const double h = T / n_macro;

    // triple-jump composition weights
    const double w1 = 1.0 / (2.0 - std::cbrt(2.0));
    const double w0 = 1.0 - 2.0 * w1;

    Mat U = Mat::Identity(d, d);
    Vec dphase(d), kphase(d);
    Mat tmp(d, d);

    auto half_static = [&](double s) {
      for (Eigen::Index i = 0; i < d; ++i)
        dphase(i) = std::exp(-I * (0.5 * s) * E_(i));
      U.array().colwise() *= dphase.array();
    };
    auto kick = [&](double f, double s) {
      for (Eigen::Index i = 0; i < d; ++i)
        kphase(i) = std::exp(-I * (f * s) * lam_(i));
      tmp.noalias() = Padj_ * U;
      tmp.array().colwise() *= kphase.array();
      U.noalias() = P_ * tmp;
    };
    auto strang = [&](double t0, double s) {
      half_static(s);
      kick(eps * std::cos(omega * (t0 + 0.5 * s) + phase), s);
      half_static(s);
    };

    if (hook) (*hook)(0, U);
    for (int m = 0; m < n_macro; ++m) {
      const double t0 = h * m;
      strang(t0, w1 * h);
      strang(t0 + w1 * h, w0 * h);
      strang(t0 + (w1 + w0) * h, w1 * h);
      if (hook && (m + 1) % cfg.oversample == 0)
        (*hook)((m + 1) / cfg.oversample, U);
    }
    return U;
  }

  RVec E_;
  Mat P_, Padj_;
  RVec lam_;
};

}  // namespace kerrcat::floquet
