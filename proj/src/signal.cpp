#include "music/signal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace music {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::BadInput: return "bad-input";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Degenerate: return "degenerate-data";
    case ErrorKind::IllPosed: return "ill-posed-subspace";
    case ErrorKind::NoSignal: return "no-signal";
    case ErrorKind::ClusterMismatch: return "cluster-mismatch";
    case ErrorKind::Numerical: return "numerical";
    case ErrorKind::Failure: return "failure";
  }
  return "unknown";
}

double wrap(double t) {
  double r = std::fmod(t, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r -= kTwoPi;
  return r;
}

double torus_offset(double u, double v) {
  double d = wrap(u - v);
  return d >= kPi ? d - kTwoPi : d;
}

double torus_distance(double u, double v) { return std::abs(torus_offset(u, v)); }

SignalParams::SignalParams(std::vector<double> x, std::vector<cdouble> a)
    : frequencies(std::move(x)), amplitudes(std::move(a)) {
  for (double& t : frequencies) t = wrap(t);
  if (frequencies.size() != amplitudes.size())
    throw Error(ErrorKind::BadInput, "signal", "frequency and amplitude counts differ");
}

double SignalParams::a_min() const {
  double r = std::numeric_limits<double>::infinity();
  for (auto a : amplitudes) r = std::min(r, std::abs(a));
  return r;
}

double SignalParams::a_max() const {
  double r = 0;
  for (auto a : amplitudes) r = std::max(r, std::abs(a));
  return r;
}

void SignalParams::validate() const {
  if (frequencies.size() != amplitudes.size())
    throw Error(ErrorKind::BadInput, "signal", "frequency and amplitude counts differ");
  for (auto a : amplitudes)
    if (a == cdouble(0)) throw Error(ErrorKind::BadInput, "signal", "zero amplitude");
  if (frequencies.size() >= 2 && min_separation(frequencies) == 0.0)
    throw Error(ErrorKind::BadInput, "signal", "repeated frequency");
}

SampleVector::SampleVector(int m) : m_(m), values_(static_cast<std::size_t>(2 * m - 1)) {
  if (m < 1) throw Error(ErrorKind::BadInput, "signal", "m must be positive");
}

SampleVector::SampleVector(int m, std::vector<cdouble> values) : m_(m), values_(std::move(values)) {
  if (m < 1) throw Error(ErrorKind::BadInput, "signal", "m must be positive");
  if (values_.size() != static_cast<std::size_t>(2 * m - 1))
    throw Error(ErrorKind::BadInput, "signal", "sample vector length must be 2m-1");
}

SampleVector SampleVector::operator+(const SampleVector& other) const {
  if (other.m_ != m_) throw Error(ErrorKind::BadInput, "signal", "sample length mismatch");
  SampleVector r(*this);
  for (std::size_t i = 0; i < values_.size(); ++i) r.values_[i] += other.values_[i];
  return r;
}

SampleVector SampleVector::operator*(cdouble c) const {
  SampleVector r(*this);
  for (auto& v : r.values_) v *= c;
  return r;
}

double min_separation(const std::vector<double>& x) {
  if (x.size() < 2) throw Error(ErrorKind::Domain, "signal", "separation needs at least two points");
  std::vector<double> w(x.size());
  std::transform(x.begin(), x.end(), w.begin(), wrap);
  std::sort(w.begin(), w.end());
  double best = kTwoPi - (w.back() - w.front());
  for (std::size_t i = 1; i < w.size(); ++i) best = std::min(best, w[i] - w[i - 1]);
  return best;
}

SampleVector synthesize(const SignalParams& params, int m) {
  SampleVector y(m);
  for (std::size_t j = 0; j < params.size(); ++j) {
    const double x = params.frequencies[j];
    const cdouble a = params.amplitudes[j];
    for (int k = -m + 1; k <= m - 1; ++k) y.at(k) += a * std::polar(1.0, x * k);
  }
  return y;
}

Matching matching_distance(const std::vector<double>& x, const std::vector<double>& xhat) {
  if (x.size() != xhat.size())
    throw Error(ErrorKind::Domain, "signal", "matching requires equal cardinalities");
  const std::size_t s = x.size();
  Matching best;
  if (s == 0) return best;

  auto sorted_order = [](const std::vector<double>& v) {
    std::vector<int> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return wrap(v[a]) < wrap(v[b]); });
    return idx;
  };
  const auto ox = sorted_order(x);
  const auto oy = sorted_order(xhat);

  best.error = std::numeric_limits<double>::infinity();
  std::size_t best_shift = 0;
  for (std::size_t c = 0; c < s; ++c) {
    double e = 0;
    for (std::size_t i = 0; i < s && e < best.error; ++i)
      e = std::max(e, torus_distance(x[ox[i]], xhat[oy[(i + c) % s]]));
    if (e < best.error) {
      best.error = e;
      best_shift = c;
    }
  }
  best.perm.assign(s, 0);
  for (std::size_t i = 0; i < s; ++i) best.perm[ox[i]] = oy[(i + best_shift) % s];
  return best;
}

SampleVector reflect_extend(const std::vector<cdouble>& samples) {
  if (samples.empty() || samples.size() % 2 != 0)
    throw Error(ErrorKind::BadInput, "signal", "reflection needs an even, nonzero number of samples");
  const int m2 = static_cast<int>(samples.size());
  SampleVector out(m2);
  for (int k = 0; k < m2; ++k) {
    out.at(k) = samples[k];
    if (k > 0) out.at(-k) = std::conj(samples[k]);
  }
  return out;
}

}  // namespace music
