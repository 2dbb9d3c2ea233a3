#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "kerrcat/common.hpp"

using namespace kerrcat;

namespace {
// brute-force oracle: best permutation by exhaustive search
double best_permutation_weight(const RMat& w) {
  const int n = static_cast<int>(w.rows());
  std::vector<int> p(n);
  for (int i = 0; i < n; ++i) p[i] = i;
  double best = -1;
  do {
    double s = 0;
    for (int i = 0; i < n; ++i) s += w(i, p[i]);
    best = std::max(best, s);
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}
}  // namespace

TEST_CASE("assignment solver matches exhaustive search", "[common]") {
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 6;
    RMat w(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) w(i, j) = u(rng);
    auto perm = max_weight_assignment(w);
    std::vector<char> seen(n, 0);
    double s = 0;
    for (int i = 0; i < n; ++i) {
      REQUIRE(perm[i] >= 0);
      REQUIRE(perm[i] < n);
      REQUIRE(!seen[perm[i]]);
      seen[perm[i]] = 1;
      s += w(i, perm[i]);
    }
    REQUIRE_THAT(s, Catch::Matchers::WithinAbs(best_permutation_weight(w), 1e-12));
  }
}

TEST_CASE("assignment solver picks out a noisy permutation", "[common]") {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> u(0.0, 0.2);
  const int n = 40;
  std::vector<int> target(n);
  for (int i = 0; i < n; ++i) target[i] = (i * 7 + 3) % n;
  RMat w(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) w(i, j) = u(rng);
  for (int i = 0; i < n; ++i) w(i, target[i]) = 0.8 + u(rng);
  auto perm = max_weight_assignment(w);
  for (int i = 0; i < n; ++i) REQUIRE(perm[i] == target[i]);
}

TEST_CASE("wrap_centered and circular_distance", "[common]") {
  const double m = 10.0;
  REQUIRE_THAT(wrap_centered(3.0, m), Catch::Matchers::WithinAbs(3.0, 1e-14));
  REQUIRE_THAT(wrap_centered(7.0, m), Catch::Matchers::WithinAbs(-3.0, 1e-14));
  REQUIRE_THAT(wrap_centered(-7.0, m), Catch::Matchers::WithinAbs(3.0, 1e-14));
  REQUIRE_THAT(wrap_centered(5.0, m), Catch::Matchers::WithinAbs(-5.0, 1e-14));
  REQUIRE_THAT(circular_distance(9.9, 0.1, m), Catch::Matchers::WithinAbs(0.2, 1e-12));
  REQUIRE_THAT(circular_distance(2.0, 8.0, m), Catch::Matchers::WithinAbs(4.0, 1e-12));
}

TEST_CASE("gauge_fix_columns makes dominant component real positive", "[common]") {
  std::mt19937 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  Mat v(8, 3);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 3; ++j) v(i, j) = cplx(g(rng), g(rng));
  Mat w = v;
  gauge_fix_columns(w);
  for (int j = 0; j < 3; ++j) {
    // norms preserved, only a phase applied
    REQUIRE_THAT(w.col(j).norm(), Catch::Matchers::WithinRel(v.col(j).norm(), 1e-12));
    Eigen::Index imax;
    w.col(j).cwiseAbs().maxCoeff(&imax);
    REQUIRE(std::abs(std::imag(w(imax, j))) < 1e-12);
    REQUIRE(std::real(w(imax, j)) > 0);
  }
}

TEST_CASE("hermitize and residual helpers", "[common]") {
  Mat m(2, 2);
  m << cplx(1, 0), cplx(0.5, 0.25), cplx(0.5, -0.25), cplx(2, 0);
  REQUIRE(max_abs(m - hermitize(m)) < 1e-15);
  Mat u(2, 2);
  double s = 1.0 / std::sqrt(2.0);
  u << cplx(s, 0), cplx(s, 0), cplx(s, 0), cplx(-s, 0);
  REQUIRE(unitarity_residual(u) < 1e-15);
}
