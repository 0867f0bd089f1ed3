#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "music/estimator.hpp"
#include "music/noise.hpp"
#include "music/rng.hpp"

namespace music {

// Either one fixed (x, a) shared by every trial or a fresh random draw per trial.
struct SignalFamily {
  int s = 3;
  double separation = 8.0;  // minimum separation in units of pi / m (random draws)
  double a_min = 1.0;       // amplitude moduli uniform in [a_min, a_max] (random draws)
  double a_max = 1.0;
  bool fixed = true;
  std::vector<double> x;    // fixed frequencies
  std::vector<cdouble> a;   // fixed amplitudes

  // x = {0.5, 2.0, 4.0}, unit moduli with phases {0.3, 1.7, -2.1}.
  static SignalFamily standard();
  static SignalFamily random(int s, double separation, double a_min, double a_max);
  SignalParams sample(int m, CounterRng& rng) const;
  void validate() const;
};

// Frequencies uniform on the torus subject to min separation `min_sep`, by rejection.
std::vector<double> random_separated_frequencies(int s, double min_sep, CounterRng& rng);

struct ExperimentSpec {
  SignalFamily family = SignalFamily::standard();
  double sigma = 0.1;
  std::vector<double> r_values{0.0};
  std::vector<int> m_values;
  int trials = 50;
  double percentile = 90.0;
  EstimatorConfig config;
  std::uint64_t seed = 1;
  int threads = 0;          // 0 uses the hardware concurrency
  bool diagnostics = true;  // computes theta and rho against the clean signal

  void validate() const;
};

struct TrialRecord {
  int m = 0;
  double r = 0.0;
  int trial = 0;
  bool failed = false;
  std::string failure_stage;
  std::string failure_kind;
  int s = 0;
  int s_hat = 0;
  bool s_correct = false;
  double frequency_error = 0.0;  // matching distance
  double amplitude_error = 0.0;  // max modulus error under the matching
  double theta = -1.0;           // -1 when diagnostics are off
  double rho = -1.0;
  int n_used = 0;
  StageTimes seconds;
  EvalCounters counters;
};

struct SummaryRow {
  int m = 0;
  double r = 0.0;
  int trials = 0;
  int failures = 0;
  double frequency_percentile = 0.0;
  double amplitude_percentile = 0.0;
};

struct SlopeFit {
  double r = 0.0;
  bool fitted = false;  // false when the fit is skipped (zero errors or one m)
  double frequency_slope = 0.0;
  double amplitude_slope = 0.0;
};

struct ExperimentResult {
  std::vector<TrialRecord> trials;
  std::vector<SummaryRow> summary;
  std::vector<SlopeFit> slopes;
};

// Nearest-rank percentile: the ceil(p N / 100)-th smallest value.
double nearest_rank_percentile(std::vector<double> values, double p);

// Least-squares slope of y against x.
double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

// Log-spaced integers from lo to hi inclusive.
std::vector<int> log_spaced(int lo, int hi, int count);

// One trial, deterministic in (spec.seed, indices).
TrialRecord run_trial(const ExperimentSpec& spec, int m_index, int r_index, int trial);

ExperimentResult run_experiment(const ExperimentSpec& spec);

void write_trials_csv(const std::string& path, const std::vector<TrialRecord>& trials);
void write_summary_csv(const std::string& path, const ExperimentResult& result);

struct RuntimeTrial {
  double svd_seconds = 0.0;
  double gradient_seconds = 0.0;
  double classical_seconds = 0.0;
  long long gradient_evals = 0;  // coarse grid + gradient steps
  long long coarse_grid = 0;
  long long classical_evals = 0;
  double disagreement = 0.0;  // matching distance between the two estimates
  double frequency_error_gradient = 0.0;
  double frequency_error_classical = 0.0;
};

struct RuntimeTable {
  int m = 0;
  double sigma = 0.0;
  double classical_spacing = 0.0;
  double classical_mesh = 0.0;
  std::vector<RuntimeTrial> trials;
  double worst_svd = 0.0;
  double worst_gradient = 0.0;
  double worst_classical = 0.0;
  double measured_eval_ratio = 0.0;   // classical evals / Gradient-MUSIC evals, worst trial
  double predicted_eval_ratio = 0.0;  // |G_fine| / |G_coarse|
};

// Classical MUSIC runs on a uniform grid of spacing 0.1 sigma m^{-3/2} unless
// classical_spacing is given.
RuntimeTable runtime_benchmark(int m, double sigma, int trials, std::uint64_t seed,
                               const EstimatorConfig& config = {}, double classical_spacing = 0.0);

void write_runtime_csv(const std::string& path, const RuntimeTable& table);

// Exact Fourier subspace U and a perturbation W with sine-theta distance near the target.
struct LandscapeInstance {
  int m = 0;
  std::vector<double> x;
  Subspace exact;
  Subspace perturbed;
  double theta = 0.0;  // measured sine-theta distance
  std::uint64_t seed = 0;
};

LandscapeInstance make_landscape_instance(int m, const std::vector<double>& x, double theta_target,
                                          std::uint64_t seed);
LandscapeInstance random_landscape_instance(int m, int s, double separation, double theta_target,
                                            std::uint64_t seed);

// Critical point of q in x0 +- radius by safeguarded Newton on q'.
std::optional<double> locate_critical_point(const Landscape& q, double x0, double radius);

struct InstanceReport {
  std::uint64_t seed = 0;
  int m = 0;
  int s = 0;
  double theta = 0.0;
  std::vector<std::string> violations;  // clause label and detail, in check order
  std::vector<double> critical_points;
  bool pass() const { return violations.empty(); }
};

// Checks the landscape clauses (a)-(f), the accepted-set clauses and the descent
// invariants on one instance, sampling `points` per window.
InstanceReport check_landscape(const LandscapeInstance& inst, int points = 1000);

struct SweepReport {
  std::vector<InstanceReport> instances;
  int violations() const;
};

struct SweepSpec {
  int count = 100;
  std::vector<int> m_values{100, 200, 500};
  int s_min = 1;
  int s_max = 5;
  double separation = 8.0;  // units of pi / m
  double theta_min = 0.0;
  double theta_max = 0.01;
  int points = 1000;
  std::uint64_t seed = 1;
  int threads = 0;
};

SweepReport landscape_sweep(const SweepSpec& spec);

struct CrossCheck {
  double mesh = 0.0;
  double max_disagreement = 0.0;
  double tolerance = 0.0;  // mesh + 7 theta / m + 77 pi 0.839^n / m
  int n = 0;
  bool pass = false;
};

// Classical MUSIC on a grid of mesh theta / (10 m) against Gradient-MUSIC with n steps.
CrossCheck cross_method_check(const LandscapeInstance& inst, int n);

// Runs f(i) for i in [0, count) over a pool of workers.
void parallel_for(int count, int threads, const std::function<void(int)>& f);

}  // namespace music
