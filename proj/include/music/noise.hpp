#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "music/subspace.hpp"

namespace music {

// Either a fixed vector or complex Gaussian noise with Sigma_kk = sigma^2 (1 + |k|)^(2r).
struct NoiseModel {
  enum class Kind { Deterministic, GaussianDiag };
  Kind kind = Kind::GaussianDiag;
  double sigma = 0.0;
  double r = 0.0;
  SampleVector fixed;  // Deterministic only

  static NoiseModel gaussian(double sigma, double r);
  static NoiseModel deterministic(SampleVector eta);
  double variance(int k) const { return sigma * sigma * std::pow(1.0 + std::abs(k), 2.0 * r); }
  void validate() const;
};

// Noise for k = -m+1..m-1; Gaussian draws depend only on (seed, stream).
SampleVector draw(const NoiseModel& model, int m, std::uint64_t seed, std::uint64_t stream = 0);

// p = infinity gives the max norm; p < 1 throws.
double lp_norm(const SampleVector& eta, double p);

struct NormCheck {
  double lhs = 0.0;  // ||T(eta)||_2
  double rhs = 0.0;  // 2 m^(1 - 1/p) ||eta||_p
  bool pass = false;
};
NormCheck toeplitz_norm_check(const SampleVector& eta, double p);

// tr(Sigma) summed over k = -m+1..m-1.
double trace_sigma(const NoiseModel& model, int m);

// 2m exp(-t^2 / (2 tr Sigma)), capped at 1.
double gaussian_tail_bound(const NoiseModel& model, int m, double t);

// Smallest t with gaussian_tail_bound(t) <= level.
double gaussian_tail_level(const NoiseModel& model, int m, double level);

}  // namespace music
