#include "music/noise.hpp"

#include <cmath>

#include "music/rng.hpp"

namespace music {

NoiseModel NoiseModel::gaussian(double sigma, double r) {
  NoiseModel n;
  n.kind = Kind::GaussianDiag;
  n.sigma = sigma;
  n.r = r;
  n.validate();
  return n;
}

NoiseModel NoiseModel::deterministic(SampleVector eta) {
  NoiseModel n;
  n.kind = Kind::Deterministic;
  n.fixed = std::move(eta);
  return n;
}

void NoiseModel::validate() const {
  if (kind == Kind::GaussianDiag && (!(sigma >= 0) || !std::isfinite(sigma) || !std::isfinite(r)))
    throw Error(ErrorKind::BadInput, "noise", "sigma must be finite and nonnegative, r finite");
}

SampleVector draw(const NoiseModel& model, int m, std::uint64_t seed, std::uint64_t stream) {
  model.validate();
  if (model.kind == NoiseModel::Kind::Deterministic) {
    if (model.fixed.m() != m) throw Error(ErrorKind::BadInput, "noise", "noise vector has the wrong length");
    return model.fixed;
  }
  SampleVector eta(m);
  CounterRng rng(seed, stream);
  for (int k = eta.min_index(); k <= eta.max_index(); ++k) {
    const double sd = std::sqrt(model.variance(k) / 2.0);
    const double re = rng.normal();
    const double im = rng.normal();
    eta.at(k) = cdouble(sd * re, sd * im);
  }
  return eta;
}

double lp_norm(const SampleVector& eta, double p) {
  if (!(p >= 1)) throw Error(ErrorKind::Domain, "noise", "p must be at least 1");
  if (std::isinf(p)) {
    double mx = 0.0;
    for (const auto& v : eta.values()) mx = std::max(mx, std::abs(v));
    return mx;
  }
  if (p == 1) {
    double s = 0.0;
    for (const auto& v : eta.values()) s += std::abs(v);
    return s;
  }
  double mx = 0.0;
  for (const auto& v : eta.values()) mx = std::max(mx, std::abs(v));
  if (mx == 0) return 0.0;
  double s = 0.0;
  for (const auto& v : eta.values()) s += std::pow(std::abs(v) / mx, p);
  return mx * std::pow(s, 1.0 / p);
}

NormCheck toeplitz_norm_check(const SampleVector& eta, double p) {
  const int m = eta.m();
  NormCheck c;
  c.lhs = spectral_norm(toeplitz(eta));
  const double expo = std::isinf(p) ? 1.0 : 1.0 - 1.0 / p;
  c.rhs = 2.0 * std::pow(static_cast<double>(m), expo) * lp_norm(eta, p);
  c.pass = c.lhs <= c.rhs * (1 + 1e-12) + 1e-300;
  return c;
}

double trace_sigma(const NoiseModel& model, int m) {
  if (model.kind == NoiseModel::Kind::Deterministic)
    throw Error(ErrorKind::Domain, "noise", "trace needs a Gaussian model");
  double s = 0.0;
  for (int k = -m + 1; k <= m - 1; ++k) s += model.variance(k);
  return s;
}

double gaussian_tail_bound(const NoiseModel& model, int m, double t) {
  const double tr = trace_sigma(model, m);
  if (tr == 0) return t > 0 ? 0.0 : 1.0;
  return std::min(1.0, 2.0 * m * std::exp(-t * t / (2.0 * tr)));
}

double gaussian_tail_level(const NoiseModel& model, int m, double level) {
  if (!(level > 0 && level < 1)) throw Error(ErrorKind::Domain, "noise", "level must lie in (0, 1)");
  const double tr = trace_sigma(model, m);
  return std::sqrt(2.0 * tr * std::log(2.0 * m / level));
}

}  // namespace music
