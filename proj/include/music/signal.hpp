#pragma once

#include <complex>
#include <numbers>
#include <vector>

#include "music/error.hpp"

namespace music {

using cdouble = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Canonical representative of t in [0, 2pi).
double wrap(double t);

// Wrap-around distance on R/2piZ, in [0, pi].
double torus_distance(double u, double v);

// Signed offset u - v reduced to [-pi, pi).
double torus_offset(double u, double v);

struct TorusPoint {
  double value = 0.0;
  TorusPoint() = default;
  explicit TorusPoint(double t) : value(wrap(t)) {}
};

inline double distance(TorusPoint u, TorusPoint v) { return torus_distance(u.value, v.value); }

struct SignalParams {
  std::vector<double> frequencies;  // in [0, 2pi)
  std::vector<cdouble> amplitudes;

  SignalParams() = default;
  SignalParams(std::vector<double> x, std::vector<cdouble> a);

  std::size_t size() const { return frequencies.size(); }
  double a_min() const;
  double a_max() const;
  // Throws BadInput unless frequencies are distinct and amplitudes nonzero.
  void validate() const;
};

// Samples h(k) for k = -m+1..m-1. Storage is flat: index k lives at position k + m - 1.
// Every other module goes through at(k) or values().
class SampleVector {
 public:
  SampleVector() = default;
  explicit SampleVector(int m);
  SampleVector(int m, std::vector<cdouble> values);

  int m() const { return m_; }
  int min_index() const { return -m_ + 1; }
  int max_index() const { return m_ - 1; }
  std::size_t size() const { return values_.size(); }

  cdouble& at(int k) { return values_[static_cast<std::size_t>(k + m_ - 1)]; }
  const cdouble& at(int k) const { return values_[static_cast<std::size_t>(k + m_ - 1)]; }

  const std::vector<cdouble>& values() const { return values_; }
  std::vector<cdouble>& values() { return values_; }

  SampleVector operator+(const SampleVector& other) const;
  SampleVector operator*(cdouble c) const;

 private:
  int m_ = 0;
  std::vector<cdouble> values_;
};

double min_separation(const std::vector<double>& x);

SampleVector synthesize(const SignalParams& params, int m);

struct Matching {
  std::vector<int> perm;  // x[j] is paired with xhat[perm[j]]
  double error = 0.0;     // max_j distance(x[j], xhat[perm[j]])
};

Matching matching_distance(const std::vector<double>& x, const std::vector<double>& xhat);

// Conjugate-symmetric extension of samples at k = 0..2m-1 to k = -2m+1..2m-1.
SampleVector reflect_extend(const std::vector<cdouble>& samples);

}  // namespace music
