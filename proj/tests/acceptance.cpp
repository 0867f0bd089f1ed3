// Acceptance checks 1-10. Prints one PASS/FAIL line per criterion; exits nonzero on any FAIL.
// Optional arguments select a subset, e.g. `acceptance 1 5 9`.

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "music/amplitude.hpp"
#include "music/constants.hpp"
#include "music/estimator.hpp"
#include "music/harness.hpp"
#include "music/landscape.hpp"
#include "music/noise.hpp"
#include "test_util.hpp"

using namespace music;
using namespace music::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string str(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double theorem_bound(double theta, int n, int m) { return (7 * theta + 77 * kPi * std::pow(0.839, n)) / m; }

Outcome noiseless_recovery() {
  const int m = 200;
  CounterRng rng(1001, 0);
  double fe = 0, ae = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = trial == 0 ? SignalFamily::standard().sample(m, rng) : random_signal(m, 3, 8.0, rng, 0.5, 2.0);
    EstimatorConfig cfg;
    cfg.n = 200;
    const auto gm = gradient_music(Subspace::span_of(fourier_matrix(m, p.frequencies)), cfg);
    const auto match = matching_distance(p.frequencies, gm.frequencies);
    const auto a = quadratic_amplitudes(gm.frequencies, toeplitz(synthesize(p, m)));
    fe = std::max(fe, match.error);
    for (int j = 0; j < 3; ++j) ae = std::max(ae, std::abs(p.amplitudes[j] - a[match.perm[j]]));
  }
  return {fe <= 1e-8 && ae <= 1e-8, "20 signals, max frequency error " + str(fe) + ", max amplitude error " + str(ae) + " (tol 1e-8)"};
}

Outcome per_trial_bound() {
  ExperimentSpec spec;
  spec.family = SignalFamily::random(3, 8.0, 3.0, 10.0);
  spec.sigma = 0.1;
  spec.m_values = {500};
  spec.trials = 200;
  spec.seed = 2002;
  const auto res = run_experiment(spec);
  int qualifying = 0, within = 0;
  double worst = 0;
  for (const auto& t : res.trials) {
    if (t.failed || !t.s_correct || t.theta > 0.01) continue;
    ++qualifying;
    const double b = theorem_bound(t.theta, t.n_used, t.m);
    worst = std::max(worst, t.frequency_error / b);
    within += t.frequency_error <= b;
  }
  return {qualifying > 0 && within == qualifying,
          std::to_string(within) + "/" + std::to_string(qualifying) + " qualifying trials within 7theta/m + 77pi 0.839^n/m, worst error/bound " + str(worst)};
}

Outcome slope_reproduction() {
  ExperimentSpec spec;
  spec.family = SignalFamily::standard();
  spec.sigma = 0.1;
  spec.r_values = {-0.25, 0.0, 0.25};
  spec.m_values = log_spaced(100, 3162, 5);
  spec.trials = 50;
  spec.percentile = 90;
  spec.diagnostics = false;
  spec.seed = 3003;
  const auto res = run_experiment(spec);
  bool ok = true;
  std::ostringstream os;
  for (const auto& f : res.slopes) {
    const double ef = -1.5 + f.r, ea = -0.5 + f.r;
    const bool good = f.fitted && std::abs(f.frequency_slope - ef) <= 0.2 && std::abs(f.amplitude_slope - ea) <= 0.2;
    ok = ok && good;
    os << "r=" << f.r << ": freq " << str(f.frequency_slope) << " (" << ef << "), amp " << str(f.amplitude_slope) << " (" << ea
       << "); ";
  }
  os << "tol 0.2";
  return {ok, os.str()};
}

Outcome landscape_suite() {
  SweepSpec spec;
  spec.count = 100;
  spec.m_values = {100, 200, 500};
  spec.points = 1000;
  spec.seed = 4004;
  const auto rep = landscape_sweep(spec);
  std::string first;
  for (const auto& r : rep.instances)
    if (!r.pass() && first.empty()) first = "; first: seed " + std::to_string(r.seed) + " " + r.violations.front();
  return {rep.instances.size() == 100 && rep.violations() == 0,
          std::to_string(rep.instances.size()) + " instances, " + std::to_string(rep.violations()) + " violations" + first};
}

Outcome constants_certification() {
  CertificationInput in;
  in.compare_published = true;
  const auto rep = certify(in);
  std::ostringstream os;
  for (const auto& l : rep.lines)
    if (!l.pass) os << l.name << " = " << str(l.value) << " (" << l.note << "); ";
  CertificationInput low;
  low.beta = 3.4;
  const bool low_fails = !certify(low).all_pass();
  os << "beta=3.4 " << (low_fails ? "reports failure" : "unexpectedly passes");
  return {rep.all_pass() && low_fails, os.str()};
}

Outcome toeplitz_norm() {
  CounterRng rng(6006, 0);
  int cases = 0, pass = 0;
  double worst = 0;
  for (int m : {50, 200})
    for (double p : {1.0, 2.0, std::numeric_limits<double>::infinity()})
      for (int i = 0; i < 50; ++i) {
        const auto c = toeplitz_norm_check(random_samples(m, rng), p);
        ++cases;
        pass += c.pass;
        worst = std::max(worst, c.lhs / c.rhs);
      }
  return {pass == cases, std::to_string(pass) + "/" + std::to_string(cases) + " cases, worst lhs/rhs " + str(worst)};
}

Outcome sparsity_detection() {
  ExperimentSpec spec;
  spec.family = SignalFamily::random(3, 8.0, 10.0, 100.0);
  spec.sigma = 0.1;
  spec.m_values = {500};
  spec.trials = 200;
  spec.seed = 7007;
  const auto res = run_experiment(spec);
  int qualifying = 0, correct = 0;
  for (const auto& t : res.trials) {
    if (t.rho > 0.01) continue;
    ++qualifying;
    correct += t.s_correct;
  }
  return {qualifying > 0 && correct == qualifying,
          std::to_string(correct) + "/" + std::to_string(qualifying) + " qualifying trials (rho <= 0.01) with s_hat = s"};
}

Outcome runtime_gap() {
  const auto t = runtime_benchmark(1000, 0.01, 10, 8008);
  const double speedup = t.worst_classical / t.worst_gradient;
  const double ratio = t.measured_eval_ratio / t.predicted_eval_ratio;
  return {speedup >= 10 && ratio >= 0.5 && ratio <= 2,
          "worst-case speedup " + str(speedup) + "x (>= 10), eval ratio measured/predicted " + str(ratio) + " (within 2x)"};
}

Outcome derivative_check() {
  CounterRng rng(9009, 0);
  double worst = 0;
  for (int i = 0; i < 200; ++i) {
    const int m = 40 + static_cast<int>(rng.uniform() * 461);
    const int s = 1 + static_cast<int>(rng.uniform() * 5);
    const Landscape q(i % 2 ? random_subspace(m, s, rng) : Subspace::span_of(fourier_matrix(m, random_separated_frequencies(s, 8 * kPi / m, rng))));
    const double t = rng.uniform(0, kTwoPi);
    const double h = 1e-3 / m;
    auto d4 = [&](const std::function<double(double)>& f) {
      return (-f(t + 2 * h) + 8 * f(t + h) - 8 * f(t - h) + f(t - 2 * h)) / (12 * h);
    };
    const auto p = q.evaluate(t, 2);
    const double fd1 = d4([&](double u) { return q.value(u); });
    const double fd2 = d4([&](double u) { return q.grad(u); });
    // Relative error, floored at 1e-3 of the natural scale m^order.
    worst = std::max(worst, std::abs(p.dq - fd1) / std::max(std::abs(p.dq), 1e-3 * m));
    worst = std::max(worst, std::abs(p.d2q - fd2) / std::max(std::abs(p.d2q), 1e-3 * m * m));
  }
  return {worst <= 1e-5, "200 points, worst relative error " + str(worst) + " (tol 1e-5)"};
}

Outcome cross_method() {
  CounterRng rng(10010, 0);
  int pass = 0;
  double worst = 0;
  const int ms[] = {100, 200, 500};
  for (int i = 0; i < 20; ++i) {
    const int m = ms[i % 3];
    const int s = 1 + i % 5;
    const double theta = rng.uniform(0.002, 0.01);
    const auto inst = random_landscape_instance(m, s, 8.0, theta, 10010 + static_cast<std::uint64_t>(i));
    const auto c = cross_method_check(inst, auto_iterations(inst.theta));
    pass += c.pass;
    worst = std::max(worst, c.max_disagreement / c.tolerance);
  }
  return {pass == 20, std::to_string(pass) + "/20 instances agree within mesh + 7theta/m + 77pi 0.839^n/m, worst disagreement/tol " + str(worst)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"noiseless exact recovery", noiseless_recovery},
      {"per-trial theorem bound", per_trial_bound},
      {"error-rate slopes", slope_reproduction},
      {"landscape invariant suite", landscape_suite},
      {"constants certification", constants_certification},
      {"Toeplitz norm bound", toeplitz_norm},
      {"sparsity detection", sparsity_detection},
      {"runtime gap", runtime_gap},
      {"derivative correctness", derivative_check},
      {"cross-method agreement", cross_method},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %2d %-28s %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
