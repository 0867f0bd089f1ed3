#include "music/estimator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

namespace music {

namespace {

constexpr long long kStreamRow = 1LL << 14;
constexpr long long kSingleRowMax = 1LL << 20;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

void EstimatorConfig::validate(int m) const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::Domain, "config", what); };
  if (m < 2) fail("m must be at least 2");
  if (!(gamma > 0 && gamma < 1)) fail("gamma must lie in (0, 1)");
  if (!(alpha > 0 && alpha <= 0.529)) fail("alpha must lie in (0, 0.529]");
  if (grid_spacing < 0 || !std::isfinite(grid_spacing)) fail("grid_spacing must be positive");
  if (step < 0 || !std::isfinite(step)) fail("step must be positive");
  if (step_for(m) > 6.754 / (static_cast<double>(m) * m)) fail("step exceeds 6.754 / m^2");
  if (policy == IterationPolicy::FixedN) {
    if (n != 0 && n < 31) fail("fixed-n policy needs n >= 31");
  } else {
    if (n_min < 31) fail("n_min must be at least 31");
    if (n_max < n_min) fail("n_max must be at least n_min");
    if (epsilon < 0 || !std::isfinite(epsilon)) fail("epsilon must be positive");
  }
}

int auto_iterations(double theta) {
  if (!(theta >= 1e-16)) theta = 1e-16;
  return std::max(31, static_cast<int>(std::ceil(6.0 * std::log(15.0 / theta))));
}

Grid Grid::uniform(long long count, double offset) {
  if (count < 1) throw Error(ErrorKind::Domain, "grid", "grid needs at least one point");
  Grid g;
  g.uniform_ = true;
  g.count_ = count;
  g.offset_ = wrap(offset);
  g.mesh_ = kPi / static_cast<double>(count);
  return g;
}

Grid Grid::from_points(std::vector<double> points) {
  if (points.empty()) throw Error(ErrorKind::Domain, "grid", "grid needs at least one point");
  for (double& p : points) p = wrap(p);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  double gap = points.front() + kTwoPi - points.back();
  for (std::size_t i = 1; i < points.size(); ++i) gap = std::max(gap, points[i] - points[i - 1]);
  Grid g;
  g.uniform_ = false;
  g.points_ = std::move(points);
  g.mesh_ = gap / 2.0;
  return g;
}

double Grid::point(long long i) const {
  if (uniform_) return wrap(offset_ + kTwoPi * static_cast<double>(i) / static_cast<double>(count_));
  return points_[static_cast<std::size_t>(i)];
}

Grid make_grid(int m, double target_mesh) {
  (void)m;
  if (!(target_mesh > 0) || !std::isfinite(target_mesh))
    throw Error(ErrorKind::Domain, "grid", "target mesh must be positive");
  double raw = std::ceil(kPi / target_mesh);
  if (raw > 4e15) throw Error(ErrorKind::Domain, "grid", "target mesh too small");
  long long count = static_cast<long long>(raw);
  if (count > kSingleRowMax) count = (count + kStreamRow - 1) / kStreamRow * kStreamRow;
  return Grid::uniform(count, 0.0);
}

std::vector<long long> threshold_accept(const Landscape& q, const Grid& g, double alpha,
                                        std::vector<double>* values) {
  std::vector<double> local;
  std::vector<double>& v = values ? *values : local;
  if (g.is_uniform() && g.size() <= kSingleRowMax) {
    v = q.values_on_uniform_grid(static_cast<int>(g.size()), g.offset());
  } else {
    v.resize(static_cast<std::size_t>(g.size()));
    for (long long i = 0; i < g.size(); ++i) v[static_cast<std::size_t>(i)] = q.value(g.point(i));
  }
  std::vector<long long> accepted;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] < alpha) accepted.push_back(static_cast<long long>(i));
  return accepted;
}

std::vector<Cluster> find_clusters(const std::vector<long long>& accepted, const Grid& g) {
  std::vector<long long> a = accepted;
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  std::vector<Cluster> out;
  if (a.empty()) throw Error(ErrorKind::NoSignal, "clusters", "no grid point was accepted");
  const long long n = g.size();
  if (static_cast<long long>(a.size()) == n) {
    Cluster c;
    c.indices = a;
    c.representative = a[(a.size() - 1) / 2];
    out.push_back(std::move(c));
    return out;
  }
  std::vector<std::vector<long long>> runs;
  for (long long idx : a) {
    if (runs.empty() || idx != runs.back().back() + 1) runs.emplace_back();
    runs.back().push_back(idx);
  }
  if (runs.size() > 1 && runs.front().front() == 0 && runs.back().back() == n - 1) {
    runs.back().insert(runs.back().end(), runs.front().begin(), runs.front().end());
    runs.erase(runs.begin());
  }
  for (auto& run : runs) {
    Cluster c;
    c.representative = run[(run.size() - 1) / 2];
    c.indices = std::move(run);
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(),
            [](const Cluster& x, const Cluster& y) { return x.representative < y.representative; });
  return out;
}

DescentResult descend(const Landscape& q, double t0, const EstimatorConfig& config, int n_fixed) {
  const int m = q.m();
  const double h = config.step_for(m);
  DescentResult r;
  double t = wrap(t0);
  auto gradient = [&](double at) {
    const double g = q.grad(at);
    ++r.gradient_evals;
    if (!std::isfinite(g)) throw Error(ErrorKind::Numerical, "descent", "non-finite gradient");
    return g;
  };
  if (config.policy == IterationPolicy::FixedN) {
    for (int k = 0; k < n_fixed; ++k) t = wrap(t - h * gradient(t));
    r.iterations = n_fixed;
  } else {
    const double tol = config.epsilon_for(m) * m;
    for (int k = 0;; ++k) {
      const double g = gradient(t);
      if (k >= config.n_min && std::abs(g) <= tol) {
        r.iterations = k;
        break;
      }
      if (k >= config.n_max) {
        r.iterations = k;
        r.flagged = true;
        break;
      }
      t = wrap(t - h * g);
    }
  }
  r.x = t;
  return r;
}

GradientMusicResult gradient_music(const Subspace& w, const EstimatorConfig& config, double theta_hat) {
  const int m = w.m();
  config.validate(m);
  const Landscape q(w);
  const Grid g = make_grid(m, config.spacing_for(m) / 2.0);
  GradientMusicResult res;
  res.grid_size = g.size();
  res.n_used = config.n > 0 ? config.n : auto_iterations(std::isnan(theta_hat) ? 0.0 : theta_hat);
  const auto accepted = threshold_accept(q, g, config.alpha);
  res.counters.grid_evals = g.size();
  const auto clusters = find_clusters(accepted, g);
  if (static_cast<int>(clusters.size()) != w.s())
    throw Error(ErrorKind::ClusterMismatch, "gradient_music",
                "found " + std::to_string(clusters.size()) + " clusters, expected " + std::to_string(w.s()),
                static_cast<int>(clusters.size()));
  struct Item {
    double x;
    int it;
    bool flagged;
  };
  std::vector<Item> items;
  for (const auto& c : clusters) {
    const auto d = descend(q, g.point(c.representative), config, res.n_used);
    res.counters.gradient_evals += d.gradient_evals;
    items.push_back({d.x, d.iterations, d.flagged});
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.x < b.x; });
  for (const auto& it : items) {
    res.frequencies.push_back(it.x);
    res.iterations.push_back(it.it);
    res.flagged.push_back(it.flagged);
  }
  return res;
}

namespace {

struct MinimaKeeper {
  std::size_t cap;
  std::vector<std::pair<double, long long>> best;  // (value, index), ascending by value
  void offer(double v, long long i) {
    if (best.size() == cap && !(v < best.back().first)) return;
    auto pos = std::upper_bound(best.begin(), best.end(), std::make_pair(v, i));
    best.insert(pos, {v, i});
    if (best.size() > cap) best.pop_back();
  }
};

// Streams q over a uniform grid of stride * length points, row by row.
void scan_streamed(const Landscape& q, long long stride, long long length, double offset,
                   MinimaKeeper& keep, long long& minima) {
  const int P = static_cast<int>(stride), L = static_cast<int>(length);
  std::vector<double> last, first, prev, cur, next;
  q.strided_row(P, L, 0, offset, first);
  if (P == 1) {
    for (int p = 0; p < L; ++p) {
      const double v = first[p];
      if (v < first[(p + L - 1) % L] && v < first[(p + 1) % L]) {
        ++minima;
        keep.offer(v, p);
      }
    }
    return;
  }
  q.strided_row(P, L, P - 1, offset, last);
  cur = first;
  for (int row = 0; row < P; ++row) {
    const std::vector<double>& left = row == 0 ? last : prev;
    if (row + 1 == P) {
      next = first;
    } else if (row + 1 == P - 1) {
      next = last;
    } else {
      q.strided_row(P, L, row + 1, offset, next);
    }
    for (int p = 0; p < L; ++p) {
      const double v = cur[p];
      const double lv = row == 0 ? left[(p + L - 1) % L] : left[p];
      const double rv = row + 1 == P ? next[(p + 1) % L] : next[p];
      if (v < lv && v < rv) {
        ++minima;
        keep.offer(v, row + static_cast<long long>(P) * p);
      }
    }
    prev.swap(cur);
    cur.swap(next);
  }
}

}  // namespace

ClassicalResult classical_music(const Subspace& w, int s, const Grid& g) {
  if (s < 1) throw Error(ErrorKind::Domain, "classical_music", "s must be positive");
  const Landscape q(w);
  const long long n = g.size();
  MinimaKeeper keep{static_cast<std::size_t>(s), {}};
  long long minima = 0;
  if (g.is_uniform() && n > kSingleRowMax && n % kStreamRow == 0) {
    scan_streamed(q, n / kStreamRow, kStreamRow, g.offset(), keep, minima);
  } else if (g.is_uniform() && n >= 3) {
    scan_streamed(q, 1, n, g.offset(), keep, minima);
  } else {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = q.value(g.point(i));
    for (long long i = 0; i < n; ++i) {
      const double c = v[static_cast<std::size_t>(i)];
      const double l = v[static_cast<std::size_t>((i + n - 1) % n)];
      const double r = v[static_cast<std::size_t>((i + 1) % n)];
      if ((n == 1) || (c < l && c < r)) {
        ++minima;
        keep.offer(c, i);
      }
    }
  }
  if (static_cast<int>(keep.best.size()) < s)
    throw Error(ErrorKind::Failure, "classical_music",
                "found " + std::to_string(minima) + " discrete local minima, need " + std::to_string(s),
                static_cast<int>(minima));
  ClassicalResult res;
  res.evals = n;
  std::vector<std::pair<double, double>> xs;
  for (const auto& [v, i] : keep.best) xs.push_back({g.point(i), v});
  std::sort(xs.begin(), xs.end());
  for (const auto& [x, v] : xs) {
    res.frequencies.push_back(x);
    res.values.push_back(v);
  }
  return res;
}

EstimationResult full_pipeline(const SampleVector& y, const EstimatorConfig& config, std::optional<int> known_s) {
  const int m = y.m();
  config.validate(m);
  EstimationResult res;
  const ToeplitzMatrix t = toeplitz(y);

  auto start = std::chrono::steady_clock::now();
  SingularSpectrum spec;
  int s = 0;
  if (known_s) {
    s = *known_s;
    if (s < 1 || s >= m) throw Error(ErrorKind::Domain, "pipeline", "known s must lie in [1, m-1]");
    spec = leading_svd(t, s + 1, 0.0, config.svd);
    if (!(spec.sigma(0) > 0)) throw Error(ErrorKind::Degenerate, "sparsity", "Toeplitz matrix is zero");
  } else {
    spec = leading_svd(t, 1, config.gamma, config.svd);
    s = detect_sparsity(spec, config.gamma);
    if (s >= m) throw Error(ErrorKind::NoSignal, "sparsity", "every singular value clears the threshold", s);
  }
  const Subspace w = toeplitz_estimator(spec, s);
  res.seconds.svd = seconds_since(start);
  res.s_hat = s;
  res.singular_values = spec.sigma;
  res.theta_hat = spec.count() > s ? spec.sigma(s) / spec.sigma(s - 1) : 0.0;

  start = std::chrono::steady_clock::now();
  const auto gm = gradient_music(w, config, res.theta_hat);
  res.seconds.music = seconds_since(start);
  res.frequencies = gm.frequencies;
  res.iterations = gm.iterations;
  res.flagged = gm.flagged;
  res.n_used = gm.n_used;
  res.counters = gm.counters;

  start = std::chrono::steady_clock::now();
  res.amplitudes = config.amplitude == AmplitudeMethod::Quadratic
                       ? quadratic_amplitudes(res.frequencies, t)
                       : least_squares_amplitudes(res.frequencies, y);
  res.seconds.amplitude = seconds_since(start);
  res.subspace = w;
  return res;
}

}  // namespace music
