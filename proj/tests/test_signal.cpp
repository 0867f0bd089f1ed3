#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "music/signal.hpp"
#include "music/subspace.hpp"
#include "test_util.hpp"

using namespace music;
using namespace music::testing;

TEST_CASE("torus distance wraps and stays in [0, pi]") {
  CHECK(torus_distance(0.0, kPi) == doctest::Approx(kPi));
  CHECK(torus_distance(0.1, kTwoPi - 0.1) == doctest::Approx(0.2));
  CHECK(wrap(-0.5) == doctest::Approx(kTwoPi - 0.5));
  CHECK(wrap(kTwoPi) == 0.0);
  CounterRng rng(11, 0);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform(-20, 20), v = rng.uniform(-20, 20), w = rng.uniform(-20, 20);
    const double d = torus_distance(u, v);
    CHECK(d >= 0.0);
    CHECK(d <= kPi);
    CHECK(d == doctest::Approx(torus_distance(v, u)).epsilon(1e-12));
    CHECK(torus_distance(u, w) <= d + torus_distance(v, w) + 1e-12);
    double brute = 1e9;
    for (int n = -10; n <= 10; ++n) brute = std::min(brute, std::abs(u - v + kTwoPi * n));
    CHECK(d == doctest::Approx(brute).epsilon(1e-12));
  }
}

TEST_CASE("min_separation handles antipodes, wrap-around and matches brute force") {
  CHECK(min_separation({0.0, kPi}) == doctest::Approx(kPi));
  CHECK(min_separation({0.0, kTwoPi - 0.1}) == doctest::Approx(0.1));
  CHECK_THROWS_AS(min_separation({1.0}), Error);
  CHECK_THROWS_AS(min_separation({}), Error);
  CounterRng rng(12, 0);
  std::vector<double> x;
  for (int i = 0; i < 50; ++i) x.push_back(rng.uniform(0, kTwoPi));
  double brute = 1e9;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) brute = std::min(brute, torus_distance(x[i], x[j]));
  CHECK(min_separation(x) == doctest::Approx(brute).epsilon(1e-14));
}

TEST_CASE("synthesize produces the exponential sums") {
  const auto ones = synthesize(SignalParams({0.0}, {1.0}), 2);
  REQUIRE(ones.size() == 3);
  for (int k = -1; k <= 1; ++k) CHECK(std::abs(ones.at(k) - cdouble(1.0)) < 1e-15);
  const auto alt = synthesize(SignalParams({kPi}, {1.0}), 2);
  CHECK(std::abs(alt.at(-1) - cdouble(-1.0)) < 1e-15);
  CHECK(std::abs(alt.at(0) - cdouble(1.0)) < 1e-15);
  CHECK(std::abs(alt.at(1) - cdouble(-1.0)) < 1e-15);
}

TEST_CASE("Toeplitz lifting factors as Phi diag(a) Phi*") {
  CounterRng rng(13, 0);
  const int m = 64;
  const auto p = random_signal(m, 4, 8.0, rng, 0.5, 2.0);
  const Matrix t = toeplitz(synthesize(p, m)).dense();
  const Matrix phi = fourier_matrix(m, p.frequencies);
  Eigen::VectorXcd a(4);
  for (int j = 0; j < 4; ++j) a(j) = p.amplitudes[j];
  const Matrix f = phi * a.asDiagonal() * phi.adjoint();
  CHECK((t - f).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("synthesize is linear and modulation-equivariant") {
  CounterRng rng(14, 0);
  const int m = 40;
  const std::vector<double> x{0.3, 1.9, 4.4};
  const auto a = random_amplitudes(3, 0.5, 2, rng), b = random_amplitudes(3, 0.5, 2, rng);
  std::vector<cdouble> ab(3);
  for (int j = 0; j < 3; ++j) ab[j] = a[j] + b[j];
  const auto sum = synthesize(SignalParams(x, a), m) + synthesize(SignalParams(x, b), m);
  const auto direct = synthesize(SignalParams(x, ab), m);
  const double delta = 0.77;
  std::vector<double> xs = x;
  for (auto& v : xs) v += delta;
  const auto shifted = synthesize(SignalParams(xs, a), m);
  const auto base = synthesize(SignalParams(x, a), m);
  for (int k = -m + 1; k <= m - 1; ++k) {
    CHECK(std::abs(sum.at(k) - direct.at(k)) < 1e-12);
    CHECK(std::abs(shifted.at(k) - std::polar(1.0, k * delta) * base.at(k)) < 1e-11);
  }
}

TEST_CASE("well-separated Fourier matrices are near-isometries") {
  CounterRng rng(15, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 100 + 17 * trial;
    const int s = 1 + trial % 6;
    const auto x = random_separated_frequencies(s, 8.0 * kPi / m, rng);
    const auto sv = svd_dense(fourier_matrix(m, x)).sigma;
    CHECK(sv(0) <= std::sqrt(1.25 * m) + 1e-9);
    CHECK(sv(s - 1) >= std::sqrt(0.75 * m) - 1e-9);
  }
}

TEST_CASE("matching distance") {
  SUBCASE("identical sets") {
    const std::vector<double> x{0.1, 2.0, 5.0};
    const auto r = matching_distance(x, x);
    CHECK(r.error == 0.0);
    CHECK(r.perm == std::vector<int>{0, 1, 2});
  }
  SUBCASE("swap across the seam") {
    const auto r = matching_distance({0.0, kPi}, {kPi + 0.01, 0.02});
    CHECK(r.error == doctest::Approx(0.02));
    CHECK(r.perm == std::vector<int>{1, 0});
  }
  SUBCASE("cardinality mismatch") { CHECK_THROWS_AS(matching_distance({0.0, 1.0}, {0.0}), Error); }
  SUBCASE("agrees with exhaustive permutations") {
    CounterRng rng(16, 0);
    for (int trial = 0; trial < 60; ++trial) {
      const int s = 1 + trial % 6;
      std::vector<double> x, y;
      for (int j = 0; j < s; ++j) {
        x.push_back(rng.uniform(0, kTwoPi));
        y.push_back(trial % 2 ? wrap(x.back() + rng.uniform(-0.3, 0.3)) : rng.uniform(0, kTwoPi));
      }
      std::vector<int> perm(static_cast<std::size_t>(s));
      std::iota(perm.begin(), perm.end(), 0);
      double best = 1e9;
      do {
        double e = 0;
        for (int j = 0; j < s; ++j) e = std::max(e, torus_distance(x[j], y[perm[j]]));
        best = std::min(best, e);
      } while (std::next_permutation(perm.begin(), perm.end()));
      const auto r = matching_distance(x, y);
      CHECK(r.error == doctest::Approx(best).epsilon(1e-14));
      double e = 0;
      for (int j = 0; j < s; ++j) e = std::max(e, torus_distance(x[j], y[r.perm[j]]));
      CHECK(e == doctest::Approx(r.error).epsilon(1e-14));
    }
  }
}

TEST_CASE("reflect_extend builds the conjugate-symmetric extension") {
  const auto ones = reflect_extend(std::vector<cdouble>(6, 1.0));
  CHECK(ones.m() == 6);
  for (int k = -5; k <= 5; ++k) CHECK(std::abs(ones.at(k) - cdouble(1.0)) < 1e-15);
  std::vector<cdouble> e1(6, 0.0);
  e1[1] = cdouble(0, 1);
  const auto ext = reflect_extend(e1);
  CHECK(std::abs(ext.at(-1) - cdouble(0, -1)) < 1e-15);
  CHECK(std::abs(ext.at(1) - cdouble(0, 1)) < 1e-15);
  CHECK_THROWS_AS(reflect_extend(std::vector<cdouble>(5, 1.0)), Error);

  // Real amplitudes: the extension matches direct synthesis on the doubled range.
  const int m = 20;
  const SignalParams p({0.4, 2.5, 5.1}, {1.5, -0.7, 2.0});
  const auto full = synthesize(p, 2 * m);
  std::vector<cdouble> half;
  for (int k = 0; k < 2 * m; ++k) half.push_back(full.at(k));
  const auto r = reflect_extend(half);
  for (int k = -2 * m + 1; k <= 2 * m - 1; ++k) CHECK(std::abs(r.at(k) - full.at(k)) < 1e-12);
}

TEST_CASE("signal parameters are validated") {
  CHECK_THROWS_AS(SignalParams({1.0, 1.0}, {1.0, 1.0}).validate(), Error);
  CHECK_THROWS_AS(SignalParams({1.0, 2.0}, {1.0, 0.0}).validate(), Error);
  const SignalParams p({1.0, 2.0}, {cdouble(0, 2), 0.5});
  CHECK(p.a_min() == doctest::Approx(0.5));
  CHECK(p.a_max() == doctest::Approx(2.0));
}
