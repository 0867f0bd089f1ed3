#include "music/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "music/io.hpp"

namespace music {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Stream ids: low 32 bits trial, then m index, then r index; bit 63 separates signal draws.
std::uint64_t trial_stream(int m_index, int r_index, int trial) {
  return (static_cast<std::uint64_t>(r_index) << 48) | (static_cast<std::uint64_t>(m_index) << 32) |
         static_cast<std::uint32_t>(trial);
}
constexpr std::uint64_t kSignalStream = 1ULL << 63;

Matrix complex_gaussian(int rows, int cols, CounterRng& rng) {
  Matrix z(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) {
      const double re = rng.normal();
      const double im = rng.normal();
      z(i, j) = cdouble(re, im);
    }
  return z;
}

std::string fmt(double v) { return format_double(v); }

}  // namespace

void parallel_for(int count, int threads, const std::function<void(int)>& f) {
  if (count <= 0) return;
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, count);
  if (workers == 1) {
    for (int i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

SignalFamily SignalFamily::standard() {
  SignalFamily f;
  f.s = 3;
  f.fixed = true;
  f.x = {0.5, 2.0, 4.0};
  f.a = {std::polar(1.0, 0.3), std::polar(1.0, 1.7), std::polar(1.0, -2.1)};
  return f;
}

SignalFamily SignalFamily::random(int s, double separation, double a_min, double a_max) {
  SignalFamily f;
  f.fixed = false;
  f.s = s;
  f.separation = separation;
  f.a_min = a_min;
  f.a_max = a_max;
  return f;
}

void SignalFamily::validate() const {
  if (fixed) {
    if (x.empty() || x.size() != a.size())
      throw Error(ErrorKind::BadInput, "harness", "fixed family needs matching x and a");
    SignalParams(x, a).validate();
  } else {
    if (s < 1) throw Error(ErrorKind::BadInput, "harness", "s must be positive");
    if (!(separation > 0)) throw Error(ErrorKind::BadInput, "harness", "separation must be positive");
    if (!(a_min > 0 && a_max >= a_min)) throw Error(ErrorKind::BadInput, "harness", "need 0 < a_min <= a_max");
  }
}

std::vector<double> random_separated_frequencies(int s, double min_sep, CounterRng& rng) {
  if (s * min_sep >= kTwoPi) throw Error(ErrorKind::Domain, "harness", "separation too large for s points");
  // Place s gaps of at least min_sep: draw the slack uniformly on a simplex, then rotate.
  const double slack = kTwoPi - s * min_sep;
  std::vector<double> cuts(static_cast<std::size_t>(s - 1));
  for (auto& c : cuts) c = rng.uniform() * slack;
  std::sort(cuts.begin(), cuts.end());
  const double start = rng.uniform(0.0, kTwoPi);
  std::vector<double> x;
  double prev_cut = 0.0;
  double pos = start;
  for (int j = 0; j < s; ++j) {
    x.push_back(wrap(pos));
    const double c = j < s - 1 ? cuts[static_cast<std::size_t>(j)] : slack;
    // Spread the slack so gap j gets min_sep plus its simplex share; the last gap closes the loop.
    pos += min_sep + (c - prev_cut);
    prev_cut = c;
  }
  std::sort(x.begin(), x.end());
  return x;
}

SignalParams SignalFamily::sample(int m, CounterRng& rng) const {
  if (fixed) return SignalParams(x, a);
  const auto xs = random_separated_frequencies(s, separation * kPi / m, rng);
  std::vector<cdouble> amps;
  for (int j = 0; j < s; ++j) {
    const double mod = rng.uniform(a_min, a_max);
    const double phase = rng.uniform(-kPi, kPi);
    amps.push_back(std::polar(mod, phase));
  }
  return SignalParams(xs, amps);
}

void ExperimentSpec::validate() const {
  family.validate();
  if (m_values.empty()) throw Error(ErrorKind::BadInput, "harness", "m list is empty");
  for (std::size_t i = 0; i < m_values.size(); ++i) {
    if (m_values[i] < 2) throw Error(ErrorKind::BadInput, "harness", "every m must be at least 2");
    if (i && m_values[i] <= m_values[i - 1])
      throw Error(ErrorKind::BadInput, "harness", "m list must be strictly increasing");
  }
  if (trials < 1) throw Error(ErrorKind::BadInput, "harness", "trials must be at least 1");
  if (!(percentile > 0 && percentile <= 100)) throw Error(ErrorKind::BadInput, "harness", "percentile must lie in (0, 100]");
  if (r_values.empty()) throw Error(ErrorKind::BadInput, "harness", "r list is empty");
  NoiseModel::gaussian(sigma, 0.0);
  if (family.fixed)
    for (int m : m_values)
      if (min_separation(family.x) < 8.0 * kPi / m)
        throw Error(ErrorKind::BadInput, "harness", "fixed family violates separation 8 pi / m at m = " + std::to_string(m));
}

double nearest_rank_percentile(std::vector<double> values, double p) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  std::size_t rank = static_cast<std::size_t>(std::ceil(p / 100.0 * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw Error(ErrorKind::Domain, "harness", "slope fit needs two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0) throw Error(ErrorKind::Domain, "harness", "slope fit needs distinct x");
  return sxy / sxx;
}

std::vector<int> log_spaced(int lo, int hi, int count) {
  if (lo < 1 || hi < lo || count < 1) throw Error(ErrorKind::BadInput, "harness", "bad log-spaced range");
  std::vector<int> out;
  for (int i = 0; i < count; ++i) {
    const double e = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    const int v = static_cast<int>(std::lround(std::exp(std::log(lo) + e * (std::log(hi) - std::log(lo)))));
    if (out.empty() || v > out.back()) out.push_back(v);
  }
  return out;
}

TrialRecord run_trial(const ExperimentSpec& spec, int m_index, int r_index, int trial) {
  TrialRecord rec;
  rec.m = spec.m_values[static_cast<std::size_t>(m_index)];
  rec.r = spec.r_values[static_cast<std::size_t>(r_index)];
  rec.trial = trial;
  const int m = rec.m;
  const std::uint64_t stream = trial_stream(m_index, r_index, trial);
  CounterRng signal_rng(spec.seed, stream | kSignalStream);
  const SignalParams truth = spec.family.sample(m, signal_rng);
  rec.s = static_cast<int>(truth.size());
  const NoiseModel noise = NoiseModel::gaussian(spec.sigma, rec.r);
  const SampleVector clean = synthesize(truth, m);
  const SampleVector eta = draw(noise, m, spec.seed, stream);
  const SampleVector y = clean + eta;
  if (spec.diagnostics) {
    rec.rho = spec.sigma == 0 ? 0.0 : toeplitz_subspace_error(toeplitz(clean), toeplitz(eta), rec.s, spec.config.svd);
  }
  try {
    const EstimationResult est = full_pipeline(y, spec.config);
    rec.s_hat = est.s_hat;
    rec.n_used = est.n_used;
    rec.seconds = est.seconds;
    rec.counters = est.counters;
    rec.s_correct = est.s_hat == rec.s;
    if (spec.diagnostics && rec.s_correct)
      rec.theta = sine_theta(Subspace::span_of(fourier_matrix(m, truth.frequencies)), est.subspace);
    if (!rec.s_correct) {
      rec.failed = true;
      rec.failure_stage = "sparsity";
      rec.failure_kind = "WrongSparsity";
      return rec;
    }
    const Matching match = matching_distance(truth.frequencies, est.frequencies);
    rec.frequency_error = match.error;
    double amp = 0.0;
    for (std::size_t j = 0; j < truth.size(); ++j)
      amp = std::max(amp, std::abs(truth.amplitudes[j] - est.amplitudes[static_cast<std::size_t>(match.perm[j])]));
    rec.amplitude_error = amp;
  } catch (const Error& e) {
    rec.failed = true;
    rec.failure_stage = e.stage();
    rec.failure_kind = to_string(e.kind());
    try {
      const auto spectrum = leading_svd(toeplitz(y), 1, spec.config.gamma, spec.config.svd);
      rec.s_hat = detect_sparsity(spectrum, spec.config.gamma);
      rec.s_correct = rec.s_hat == rec.s;
    } catch (const Error&) {
      rec.s_hat = 0;
    }
  }
  return rec;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const int nm = static_cast<int>(spec.m_values.size());
  const int nr = static_cast<int>(spec.r_values.size());
  const int total = nm * nr * spec.trials;
  ExperimentResult res;
  res.trials.resize(static_cast<std::size_t>(total));
  // Largest m first so the slow jobs do not trail at the end of the pool.
  parallel_for(total, spec.threads, [&](int job) {
    const int per_m = nr * spec.trials;
    const int mi = nm - 1 - job / per_m;
    const int rest = job % per_m;
    const int ri = rest / spec.trials;
    const int trial = rest % spec.trials;
    const std::size_t slot = static_cast<std::size_t>((mi * nr + ri) * spec.trials + trial);
    res.trials[slot] = run_trial(spec, mi, ri, trial);
  });
  for (int ri = 0; ri < nr; ++ri) {
    SlopeFit fit;
    fit.r = spec.r_values[static_cast<std::size_t>(ri)];
    std::vector<double> lm, lf, la;
    for (int mi = 0; mi < nm; ++mi) {
      SummaryRow row;
      row.m = spec.m_values[static_cast<std::size_t>(mi)];
      row.r = fit.r;
      std::vector<double> fe, ae;
      for (int t = 0; t < spec.trials; ++t) {
        const auto& rec = res.trials[static_cast<std::size_t>((mi * nr + ri) * spec.trials + t)];
        ++row.trials;
        if (rec.failed) {
          ++row.failures;
          continue;
        }
        fe.push_back(rec.frequency_error);
        ae.push_back(rec.amplitude_error);
      }
      row.frequency_percentile = nearest_rank_percentile(fe, spec.percentile);
      row.amplitude_percentile = nearest_rank_percentile(ae, spec.percentile);
      if (row.frequency_percentile > 0 && row.amplitude_percentile > 0) {
        lm.push_back(std::log(row.m));
        lf.push_back(std::log(row.frequency_percentile));
        la.push_back(std::log(row.amplitude_percentile));
      }
      res.summary.push_back(row);
    }
    if (lm.size() >= 2 && static_cast<int>(lm.size()) == nm) {
      fit.fitted = true;
      fit.frequency_slope = least_squares_slope(lm, lf);
      fit.amplitude_slope = least_squares_slope(lm, la);
    }
    res.slopes.push_back(fit);
  }
  return res;
}

void write_trials_csv(const std::string& path, const std::vector<TrialRecord>& trials) {
  std::ostringstream os;
  os << "m,r,trial,failed,failure_stage,failure_kind,s,s_hat,s_correct,frequency_error,amplitude_error,"
        "theta,rho,n_used,svd_seconds,music_seconds,amplitude_seconds,grid_evals,gradient_evals\n";
  for (const auto& t : trials) {
    os << t.m << ',' << fmt(t.r) << ',' << t.trial << ',' << (t.failed ? 1 : 0) << ',' << t.failure_stage << ','
       << t.failure_kind << ',' << t.s << ',' << t.s_hat << ',' << (t.s_correct ? 1 : 0) << ',';
    if (t.failed) os << ",,";
    else os << fmt(t.frequency_error) << ',' << fmt(t.amplitude_error) << ',';
    os << fmt(t.theta) << ',' << fmt(t.rho) << ',' << t.n_used << ',' << fmt(t.seconds.svd) << ','
       << fmt(t.seconds.music) << ',' << fmt(t.seconds.amplitude) << ',' << t.counters.grid_evals << ','
       << t.counters.gradient_evals << '\n';
  }
  write_text_file(path, os.str());
}

void write_summary_csv(const std::string& path, const ExperimentResult& result) {
  std::ostringstream os;
  os << "m,r,trials,failures,frequency_percentile,amplitude_percentile,frequency_slope,amplitude_slope\n";
  for (const auto& row : result.summary) {
    const SlopeFit* fit = nullptr;
    for (const auto& f : result.slopes)
      if (f.r == row.r) fit = &f;
    os << row.m << ',' << fmt(row.r) << ',' << row.trials << ',' << row.failures << ','
       << fmt(row.frequency_percentile) << ',' << fmt(row.amplitude_percentile) << ',';
    if (fit && fit->fitted) os << fmt(fit->frequency_slope) << ',' << fmt(fit->amplitude_slope);
    else os << ',';
    os << '\n';
  }
  write_text_file(path, os.str());
}

RuntimeTable runtime_benchmark(int m, double sigma, int trials, std::uint64_t seed, const EstimatorConfig& config,
                               double classical_spacing) {
  if (trials < 1) throw Error(ErrorKind::BadInput, "bench", "trials must be at least 1");
  config.validate(m);
  RuntimeTable table;
  table.m = m;
  table.sigma = sigma;
  table.classical_spacing =
      classical_spacing > 0 ? classical_spacing : 0.1 * sigma * std::pow(static_cast<double>(m), -1.5);
  if (!(table.classical_spacing > 0)) throw Error(ErrorKind::BadInput, "bench", "classical spacing must be positive");
  const Grid fine = make_grid(m, table.classical_spacing / 2.0);
  const Grid coarse = make_grid(m, config.spacing_for(m) / 2.0);
  table.classical_mesh = fine.mesh();
  table.predicted_eval_ratio = static_cast<double>(fine.size()) / static_cast<double>(coarse.size());
  const SignalParams truth(SignalFamily::standard().x, SignalFamily::standard().a);
  const NoiseModel noise = NoiseModel::gaussian(sigma, 0.0);
  long long total_classical = 0, total_gradient = 0;
  for (int trial = 0; trial < trials; ++trial) {
    RuntimeTrial rt;
    const SampleVector y = synthesize(truth, m) + draw(noise, m, seed, static_cast<std::uint64_t>(trial));
    auto start = std::chrono::steady_clock::now();
    const ToeplitzMatrix t = toeplitz(y);
    const auto spectrum = leading_svd(t, 1, config.gamma, config.svd);
    const int s = detect_sparsity(spectrum, config.gamma);
    const Subspace w = toeplitz_estimator(spectrum, s);
    const double theta_hat = spectrum.sigma(s) / spectrum.sigma(s - 1);
    rt.svd_seconds = seconds_since(start);

    start = std::chrono::steady_clock::now();
    const auto gm = gradient_music(w, config, theta_hat);
    rt.gradient_seconds = seconds_since(start);
    rt.gradient_evals = gm.counters.grid_evals + gm.counters.gradient_evals;
    rt.coarse_grid = gm.counters.grid_evals;

    start = std::chrono::steady_clock::now();
    const auto cl = classical_music(w, s, fine);
    rt.classical_seconds = seconds_since(start);
    rt.classical_evals = cl.evals;

    rt.disagreement = matching_distance(gm.frequencies, cl.frequencies).error;
    rt.frequency_error_gradient = matching_distance(truth.frequencies, gm.frequencies).error;
    rt.frequency_error_classical = matching_distance(truth.frequencies, cl.frequencies).error;
    total_classical += rt.classical_evals;
    total_gradient += rt.gradient_evals;
    table.worst_svd = std::max(table.worst_svd, rt.svd_seconds);
    table.worst_gradient = std::max(table.worst_gradient, rt.gradient_seconds);
    table.worst_classical = std::max(table.worst_classical, rt.classical_seconds);
    table.trials.push_back(rt);
  }
  table.measured_eval_ratio = static_cast<double>(total_classical) / static_cast<double>(total_gradient);
  return table;
}

void write_runtime_csv(const std::string& path, const RuntimeTable& table) {
  std::ostringstream os;
  os << "trial,svd_seconds,gradient_seconds,classical_seconds,gradient_evals,classical_evals,disagreement,"
        "frequency_error_gradient,frequency_error_classical\n";
  for (std::size_t i = 0; i < table.trials.size(); ++i) {
    const auto& t = table.trials[i];
    os << i << ',' << fmt(t.svd_seconds) << ',' << fmt(t.gradient_seconds) << ',' << fmt(t.classical_seconds) << ','
       << t.gradient_evals << ',' << t.classical_evals << ',' << fmt(t.disagreement) << ','
       << fmt(t.frequency_error_gradient) << ',' << fmt(t.frequency_error_classical) << '\n';
  }
  os << "worst," << fmt(table.worst_svd) << ',' << fmt(table.worst_gradient) << ',' << fmt(table.worst_classical)
     << ",,,,,\n";
  write_text_file(path, os.str());
}

LandscapeInstance make_landscape_instance(int m, const std::vector<double>& x, double theta_target,
                                          std::uint64_t seed) {
  if (!(theta_target >= 0 && theta_target < 1))
    throw Error(ErrorKind::Domain, "landscape", "target sine-theta must lie in [0, 1)");
  LandscapeInstance inst;
  inst.m = m;
  inst.x = x;
  std::sort(inst.x.begin(), inst.x.end());
  inst.seed = seed;
  inst.exact = Subspace::span_of(fourier_matrix(m, inst.x));
  const int s = static_cast<int>(x.size());
  if (theta_target == 0) {
    inst.perturbed = inst.exact;
    inst.theta = 0.0;
    return inst;
  }
  CounterRng rng(seed, 1);
  const Matrix& u = inst.exact.basis;
  Matrix e = complex_gaussian(m, s, rng);
  e -= u * (u.adjoint() * e);
  e -= u * (u.adjoint() * e);
  e /= svd_dense(e).sigma(0);
  const double t = std::tan(std::asin(theta_target));
  // Random right rotation so the perturbed basis is not aligned with U's columns.
  const Matrix rot = orthonormalize(complex_gaussian(s, s, rng));
  inst.perturbed = Subspace(orthonormalize((u + t * e) * rot));
  inst.theta = sine_theta(inst.exact, inst.perturbed);
  return inst;
}

LandscapeInstance random_landscape_instance(int m, int s, double separation, double theta_target,
                                            std::uint64_t seed) {
  CounterRng rng(seed, 0);
  const auto x = random_separated_frequencies(s, separation * kPi / m, rng);
  return make_landscape_instance(m, x, theta_target, seed);
}

std::optional<double> locate_critical_point(const Landscape& q, double x0, double radius) {
  double lo = x0 - radius, hi = x0 + radius;
  double glo = q.grad(lo), ghi = q.grad(hi);
  if (!(glo < 0 && ghi > 0)) return std::nullopt;
  double t = x0;
  for (int it = 0; it < 200; ++it) {
    const auto p = q.evaluate(t, 2);
    if (p.dq == 0) return wrap(t);
    if (p.dq < 0) lo = t;
    else hi = t;
    double next = p.d2q > 0 ? t - p.dq / p.d2q : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-16 * std::max(1.0, std::abs(t)) || hi - lo <= 4e-16 * std::max(1.0, std::abs(t)))
      return wrap(next);
    t = next;
  }
  return wrap(t);
}

namespace {

std::vector<double> window(double lo, double hi, int points) {
  std::vector<double> t(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) t[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
  return t;
}

}  // namespace

InstanceReport check_landscape(const LandscapeInstance& inst, int points) {
  InstanceReport rep;
  rep.seed = inst.seed;
  rep.m = inst.m;
  rep.s = static_cast<int>(inst.x.size());
  rep.theta = inst.theta;
  const int m = inst.m;
  const double md = m;
  const double theta = inst.theta;
  const Landscape q(inst.perturbed);
  const double inner = kPi / (3 * md), outer = 4 * kPi / (3 * md);
  const double rel = 1e-9;  // slack for rounding in landscape evaluations
  auto violate = [&](const std::string& clause, const std::string& detail) {
    rep.violations.push_back(clause + ": " + detail);
  };
  auto where = [&](int j, double t) {
    std::ostringstream os;
    os << "j=" << j << " t=" << fmt(t);
    return os.str();
  };

  // (a) locate a critical point next to each x_j and bound its offset.
  std::vector<double> xt;
  for (int j = 0; j < rep.s; ++j) {
    const double xj = inst.x[static_cast<std::size_t>(j)];
    const auto c = locate_critical_point(q, xj, inner - 7.0 * std::max(theta, 1e-3) / md);
    if (!c) {
      violate("(a)", "no critical point bracketed near x_" + std::to_string(j));
      return rep;
    }
    xt.push_back(*c);
    const double off = torus_distance(*c, xj);
    if (off > 7 * theta / md + 1e-12 / md) violate("(a)", where(j, *c) + " offset " + fmt(off * md) + "/m > 7 theta/m");
  }
  rep.critical_points = xt;

  for (int j = 0; j < rep.s; ++j) {
    const double c = xt[static_cast<std::size_t>(j)];
    // (b) curvature band on the convexity window.
    for (double t : window(c - inner, c + inner, points)) {
      const double d2 = q.second(t) / (md * md);
      if (d2 < 0.0271 - rel || d2 > 0.269 + rel) {
        violate("(b)", where(j, t) + " q''/m^2 = " + fmt(d2));
        break;
      }
    }
    // (c) value ordering at the critical point.
    const double qc = q.value(c), qx = q.value(inst.x[static_cast<std::size_t>(j)]);
    if (qc > qx + 1e-14 || qx > theta * theta + 1e-13 || theta * theta > 1e-4)
      violate("(c)", "j=" + std::to_string(j) + " q(xt)=" + fmt(qc) + " q(x)=" + fmt(qx));
    // (d) and (f) on both slope windows.
    bool d_bad = false, f_bad = false;
    for (int side : {+1, -1}) {
      for (double u : window(inner, outer, points)) {
        const double t = c + side * u;
        const double g = q.grad(t);
        if (!d_bad && side * g < 0.0306 * md * (1 - rel)) {
          violate("(d)", where(j, t) + " q'/m = " + fmt(g / md));
          d_bad = true;
        }
        if (!f_bad && side * g > 0.292 * md * md * u * (1 + rel)) {
          violate("(f)", where(j, t) + " q'/(m^2 |t - xt|) = " + fmt(side * g / (md * md * u)));
          f_bad = true;
        }
      }
    }
  }

  // (e) far-field floor on every gap between consecutive basins.
  for (int j = 0; j < rep.s; ++j) {
    const double lo = xt[static_cast<std::size_t>(j)] + outer;
    double hi = xt[static_cast<std::size_t>((j + 1) % rep.s)] - outer;
    while (hi <= lo - 1e-15) hi += kTwoPi;
    if (rep.s == 1) hi = xt[0] + kTwoPi - outer;
    const double len = hi - lo;
    if (len <= 0) continue;
    const int n = std::max(points, static_cast<int>(std::ceil(len * 4 * md)));
    for (int i = 0; i < n; ++i) {
      const double t = lo + len * (i + 0.5) / n;
      const double v = q.value(t);
      if (v < 0.529 - rel) {
        violate("(e)", "gap " + std::to_string(j) + " t=" + fmt(wrap(t)) + " q=" + fmt(v));
        break;
      }
    }
  }

  // Accepted set on the default grid: inside the basins, meeting each, one cluster per basin.
  EstimatorConfig cfg;
  const Grid g = make_grid(m, cfg.spacing_for(m) / 2.0);
  const auto accepted = threshold_accept(q, g, cfg.alpha);
  auto basin_of = [&](double t) {
    for (int j = 0; j < rep.s; ++j)
      if (torus_distance(t, xt[static_cast<std::size_t>(j)]) <= outer) return j;
    return -1;
  };
  std::vector<int> hits(static_cast<std::size_t>(rep.s), 0);
  for (long long i : accepted) {
    const int b = basin_of(g.point(i));
    if (b < 0) {
      violate("accepted-subset", "grid point " + fmt(g.point(i)) + " accepted outside every basin");
      break;
    }
    ++hits[static_cast<std::size_t>(b)];
  }
  for (int j = 0; j < rep.s; ++j)
    if (hits[static_cast<std::size_t>(j)] == 0) violate("accepted-nonempty", "basin " + std::to_string(j) + " has no accepted point");
  if (!accepted.empty()) {
    const auto clusters = find_clusters(accepted, g);
    std::vector<int> per_basin(static_cast<std::size_t>(rep.s), 0);
    for (const auto& cl : clusters) {
      const int b = basin_of(g.point(cl.representative));
      bool one = b >= 0;
      for (long long i : cl.indices) one = one && basin_of(g.point(i)) == b;
      if (!one) {
        violate("accepted-cluster", "a cluster spans more than one basin");
        continue;
      }
      ++per_basin[static_cast<std::size_t>(b)];
    }
    for (int j = 0; j < rep.s; ++j)
      if (per_basin[static_cast<std::size_t>(j)] != 1)
        violate("accepted-cluster", "basin " + std::to_string(j) + " holds " +
                                        std::to_string(per_basin[static_cast<std::size_t>(j)]) + " clusters");
  }

  // Descent from across each basin: stays inside, reaches the convexity window within
  // 31 steps, then contracts by 0.839 per step.
  const double h = cfg.step_for(m);
  for (int j = 0; j < rep.s; ++j) {
    const double c = xt[static_cast<std::size_t>(j)];
    for (double f : {-0.999, -0.6, -0.2, 0.2, 0.6, 0.999}) {
      double t = c + f * outer;
      int entered = -1;
      double prev = std::abs(torus_offset(t, c));
      for (int k = 0; k <= 200; ++k) {
        const double d = std::abs(torus_offset(t, c));
        if (d > outer * (1 + rel)) {
          violate("descent-basin", where(j, t) + " left the basin at step " + std::to_string(k));
          break;
        }
        if (entered < 0 && d <= inner) entered = k;
        if (entered >= 0 && k > entered && d > 1e-13 / md && d > 0.839 * prev * (1 + rel) + 1e-15) {
          violate("descent-rate", where(j, t) + " step " + std::to_string(k) + " ratio " + fmt(d / prev));
          break;
        }
        if (k == 31 && entered < 0) {
          violate("descent-31", "start " + fmt(f) + " of basin " + std::to_string(j) + " not in window after 31 steps");
          break;
        }
        prev = d;
        t = wrap(t - h * q.grad(t));
      }
    }
  }
  return rep;
}

int SweepReport::violations() const {
  int n = 0;
  for (const auto& r : instances) n += static_cast<int>(r.violations.size());
  return n;
}

SweepReport landscape_sweep(const SweepSpec& spec) {
  if (spec.count < 1 || spec.m_values.empty() || spec.s_min < 1 || spec.s_max < spec.s_min ||
      !(spec.theta_min >= 0 && spec.theta_max >= spec.theta_min) || spec.points < 2)
    throw Error(ErrorKind::BadInput, "landscape", "invalid sweep specification");
  SweepReport rep;
  rep.instances.resize(static_cast<std::size_t>(spec.count));
  parallel_for(spec.count, spec.threads, [&](int i) {
    CounterRng rng(spec.seed, static_cast<std::uint64_t>(i));
    const int m = spec.m_values[static_cast<std::size_t>(i) % spec.m_values.size()];
    const int s = spec.s_min + static_cast<int>(rng.next_u32() % static_cast<std::uint32_t>(spec.s_max - spec.s_min + 1));
    const double theta = i == 0 ? spec.theta_min : rng.uniform(spec.theta_min, spec.theta_max);
    const std::uint64_t inst_seed = (spec.seed << 20) ^ static_cast<std::uint64_t>(i);
    const auto inst = random_landscape_instance(m, s, spec.separation, theta, inst_seed);
    rep.instances[static_cast<std::size_t>(i)] = check_landscape(inst, spec.points);
  });
  return rep;
}

CrossCheck cross_method_check(const LandscapeInstance& inst, int n) {
  if (!(inst.theta > 0)) throw Error(ErrorKind::Domain, "cross-check", "needs a positive sine-theta distance");
  const int m = inst.m;
  const int s = inst.perturbed.s();
  CrossCheck cc;
  cc.n = n;
  const Grid fine = make_grid(m, inst.theta / (10.0 * m));
  cc.mesh = fine.mesh();
  EstimatorConfig cfg;
  cfg.n = n;
  const auto gm = gradient_music(inst.perturbed, cfg);
  const auto cl = classical_music(inst.perturbed, s, fine);
  cc.max_disagreement = matching_distance(gm.frequencies, cl.frequencies).error;
  cc.tolerance = cc.mesh + 7.0 * inst.theta / m + 77.0 * kPi * std::pow(0.839, n) / m;
  cc.pass = cc.max_disagreement <= cc.tolerance;
  return cc;
}

}  // namespace music
