#include <doctest.h>

#include "music/amplitude.hpp"
#include "music/noise.hpp"
#include "test_util.hpp"

using namespace music;
using namespace music::testing;

namespace {
double max_error(const std::vector<cdouble>& a, const std::vector<cdouble>& b) {
  double e = 0;
  for (std::size_t j = 0; j < a.size(); ++j) e = std::max(e, std::abs(a[j] - b[j]));
  return e;
}
}  // namespace

TEST_CASE("Fourier matrix conditioning at separation 8 pi / m") {
  CounterRng rng(61, 0);
  for (int m : {50, 100, 300}) {
    const auto p = random_signal(m, 5, 8.0, rng);
    const auto sv = svd_dense(fourier_matrix(m, p.frequencies)).sigma;
    CHECK(sv[4] >= std::sqrt(3.0 * m / 4));
  }
}

TEST_CASE("exact frequencies recover amplitudes with both methods") {
  CounterRng rng(62, 0);
  for (int m : {40, 128, 257}) {
    const auto p = random_signal(m, 4, 8.0, rng, 0.5, 3.0);
    const auto y = synthesize(p, m);
    CHECK(max_error(quadratic_amplitudes(p.frequencies, toeplitz(y)), p.amplitudes) <= 1e-10);
    CHECK(max_error(least_squares_amplitudes(p.frequencies, y), p.amplitudes) <= 1e-10);
  }
}

TEST_CASE("permutation, global phase and scaling") {
  CounterRng rng(63, 0);
  const int m = 100;
  const auto p = random_signal(m, 4, 8.0, rng, 0.5, 2.0);
  const auto y = synthesize(p, m) + draw(NoiseModel::gaussian(0.2, 0), m, 4);
  std::vector<double> xhat = p.frequencies;
  for (auto& x : xhat) x = wrap(x + rng.uniform(-0.002, 0.002));
  const auto q = quadratic_amplitudes(xhat, toeplitz(y));
  const auto l = least_squares_amplitudes(xhat, y);

  const std::vector<int> perm{2, 0, 3, 1};
  std::vector<double> xp;
  for (int j : perm) xp.push_back(xhat[j]);
  const auto qp = quadratic_amplitudes(xp, toeplitz(y));
  const auto lp = least_squares_amplitudes(xp, y);
  for (int j = 0; j < 4; ++j) {
    CHECK(std::abs(qp[j] - q[perm[j]]) <= 1e-12);
    CHECK(std::abs(lp[j] - l[perm[j]]) <= 1e-12);
  }

  const cdouble phase = std::polar(1.0, 0.77);
  const auto qr = quadratic_amplitudes(xhat, toeplitz(y * phase));
  const auto lr = least_squares_amplitudes(xhat, y * phase);
  const cdouble c(-1.5, 0.25);
  const auto qs = quadratic_amplitudes(xhat, toeplitz(y * c));
  const auto ls = least_squares_amplitudes(xhat, y * c);
  for (int j = 0; j < 4; ++j) {
    CHECK(std::abs(qr[j] - phase * q[j]) <= 1e-12);
    CHECK(std::abs(lr[j] - phase * l[j]) <= 1e-12);
    CHECK(std::abs(qs[j] - c * q[j]) <= 1e-11);
    CHECK(std::abs(ls[j] - c * l[j]) <= 1e-11);
  }
}

TEST_CASE("zero data gives zero amplitudes") {
  const int m = 30;
  const SampleVector zero(m);
  for (auto a : quadratic_amplitudes({0.5, 3.0}, toeplitz(zero))) CHECK(a == cdouble(0));
  for (auto a : least_squares_amplitudes({0.5, 3.0}, zero)) CHECK(a == cdouble(0));
}

TEST_CASE("least squares residual is minimal") {
  CounterRng rng(64, 0);
  const int m = 60;
  const auto p = random_signal(m, 3, 8.0, rng);
  const auto y = synthesize(p, m) + draw(NoiseModel::gaussian(0.5, 0), m, 5);
  std::vector<double> xhat = p.frequencies;
  xhat[1] = wrap(xhat[1] + 0.01);
  const auto a = least_squares_amplitudes(xhat, y);
  const Matrix phi = fourier_matrix(2 * m - 1, xhat);
  Vector yv(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) yv(static_cast<Eigen::Index>(i)) = y.values()[i];
  Vector av(3);
  for (int j = 0; j < 3; ++j) av(j) = a[j];
  const double best = (yv - phi * av).norm();
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix u = random_matrix(3, 1, rng) * rng.uniform(0.001, 1.0);
    CHECK(best <= (yv - phi * (av + u.col(0))).norm());
  }
}

TEST_CASE("quadratic amplitude error bound with C(4) = 2") {
  CounterRng rng(65, 0);
  const double beta = 4.0;
  for (int trial = 0; trial < 30; ++trial) {
    const int m = 80 + 20 * (trial % 5);
    const int s = 1 + trial % 4;
    const auto p = random_signal(m, s, 2 * beta, rng, 0.5, 2.0);
    const auto eta = draw(NoiseModel::gaussian(rng.uniform(0.0, 0.5), 0), m, 100 + trial);
    const auto y = synthesize(p, m) + eta;
    std::vector<double> xhat = p.frequencies;
    const double shift = rng.uniform(0.0, 0.05) / m;
    for (auto& x : xhat) x = wrap(x + shift * (rng.uniform() < 0.5 ? -1 : 1));
    const auto a = quadratic_amplitudes(xhat, toeplitz(y));
    double emax = 0;
    for (int j = 0; j < s; ++j) emax = std::max(emax, torus_distance(p.frequencies[j], xhat[j]));
    const double bound = 2.0 * std::sqrt(s) * p.a_max() * m * emax +
                         beta / (beta - 1) * spectral_norm(toeplitz(eta)) / m;
    CHECK(max_error(a, p.amplitudes) <= bound);
  }
}

TEST_CASE("rank-deficient frequency sets are rejected") {
  const int m = 20;
  const auto y = synthesize(SignalParams({1.0}, {1.0}), m);
  for (auto call : {0, 1}) {
    try {
      if (call == 0) quadratic_amplitudes({1.0, 1.0}, toeplitz(y));
      else least_squares_amplitudes({1.0, 1.0 + kTwoPi}, y);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Degenerate);
    }
  }
  CHECK(parse_amplitude_method("least-squares") == AmplitudeMethod::LeastSquares);
  CHECK_THROWS_AS(parse_amplitude_method("cubic"), Error);
}
