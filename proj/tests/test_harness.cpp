#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "music/harness.hpp"
#include "test_util.hpp"

using namespace music;
using namespace music::testing;

TEST_CASE("nearest-rank percentile, slope fit and log spacing") {
  CHECK(nearest_rank_percentile({5, 1, 4, 2, 3}, 90) == 5);
  CHECK(nearest_rank_percentile({5, 1, 4, 2, 3}, 40) == 2);
  CHECK(nearest_rank_percentile({5, 1, 4, 2, 3}, 100) == 5);
  std::vector<double> v(50);
  for (int i = 0; i < 50; ++i) v[i] = 49 - i;
  CHECK(nearest_rank_percentile(v, 90) == 44);
  CHECK(least_squares_slope({0, 1, 2, 3}, {1, 3, 5, 7}) == doctest::Approx(2.0));
  CHECK(least_squares_slope({0, 1, 2}, {0, 1, 0}) == doctest::Approx(0.0));
  const auto m = log_spaced(100, 3162, 5);
  CHECK(m == std::vector<int>{100, 237, 562, 1333, 3162});
}

TEST_CASE("separated random frequencies") {
  CounterRng rng(81, 0);
  for (int t = 0; t < 200; ++t) {
    const int s = 1 + t % 7;
    const double sep = 8 * kPi / 100;
    const auto x = random_separated_frequencies(s, sep, rng);
    REQUIRE(x.size() == static_cast<std::size_t>(s));
    CHECK(std::is_sorted(x.begin(), x.end()));
    if (s > 1) CHECK(min_separation(x) >= sep);
    for (double f : x) CHECK((f >= 0 && f < kTwoPi));
  }
}

TEST_CASE("experiment: zero noise, reproducibility and summaries") {
  ExperimentSpec spec;
  spec.sigma = 0.0;
  spec.m_values = {100, 150, 200};
  spec.trials = 4;
  spec.config.n = 200;
  spec.threads = 2;
  const auto a = run_experiment(spec);
  REQUIRE(a.trials.size() == 12);
  for (const auto& t : a.trials) {
    CHECK_FALSE(t.failed);
    CHECK(t.frequency_error <= 1e-8);
    CHECK(t.amplitude_error <= 1e-8);
    CHECK(t.s_correct);
  }
  REQUIRE(a.slopes.size() == 1);
  CHECK_FALSE(a.slopes[0].fitted);

  spec.sigma = 0.1;
  spec.config.n = 0;
  spec.family = SignalFamily::random(3, 8.0, 1.0, 2.0);
  const auto b = run_experiment(spec);
  spec.threads = 1;
  const auto c = run_experiment(spec);
  REQUIRE(b.trials.size() == c.trials.size());
  for (std::size_t i = 0; i < b.trials.size(); ++i) {
    CHECK(b.trials[i].m == c.trials[i].m);
    CHECK(b.trials[i].trial == c.trials[i].trial);
    CHECK(b.trials[i].frequency_error == c.trials[i].frequency_error);
    CHECK(b.trials[i].amplitude_error == c.trials[i].amplitude_error);
    CHECK(b.trials[i].theta == c.trials[i].theta);
  }
  REQUIRE(b.summary.size() == 3);
  CHECK(b.slopes[0].fitted);
  for (const auto& t : b.trials) {
    CHECK(t.frequency_error >= 0);
    CHECK(t.theta >= 0);
    CHECK(t.rho >= 0);
  }

  const auto dir = std::filesystem::temp_directory_path() / "music_harness_test";
  std::filesystem::create_directories(dir);
  write_trials_csv((dir / "trials.csv").string(), b.trials);
  write_summary_csv((dir / "summary.csv").string(), b);
  std::ifstream f(dir / "trials.csv");
  std::string line;
  int rows = 0;
  while (std::getline(f, line)) ++rows;
  CHECK(rows == 13);
  std::filesystem::remove_all(dir);

  ExperimentSpec bad = spec;
  bad.m_values = {200, 100};
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = spec;
  bad.trials = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("trial failures are recorded rather than thrown") {
  ExperimentSpec spec;
  spec.family = SignalFamily::standard();
  spec.sigma = 50.0;
  spec.m_values = {20};
  spec.trials = 6;
  const auto r = run_experiment(spec);
  REQUIRE(r.trials.size() == 6);
  int failed = 0;
  for (const auto& t : r.trials)
    if (t.failed) {
      ++failed;
      CHECK_FALSE(t.failure_stage.empty());
    }
  CHECK(r.summary[0].failures == failed);
}

TEST_CASE("landscape instances hit the requested perturbation size") {
  for (double theta : {0.0, 0.001, 0.01}) {
    const auto inst = random_landscape_instance(150, 3, 8.0, theta, 4);
    CHECK(inst.theta == doctest::Approx(theta).epsilon(1e-6).scale(1e-12));
    CHECK(sine_theta(inst.exact, inst.perturbed) == doctest::Approx(inst.theta));
  }
}

TEST_CASE("landscape sweep passes and the exact case locates x") {
  const auto inst = random_landscape_instance(100, 2, 8.0, 0.0, 2);
  const auto rep = check_landscape(inst, 300);
  CHECK(rep.pass());
  REQUIRE(rep.critical_points.size() == 2);
  for (int j = 0; j < 2; ++j) CHECK(torus_distance(rep.critical_points[j], inst.x[j]) <= 1e-10);

  SweepSpec spec;
  spec.count = 6;
  spec.m_values = {100, 200};
  spec.s_max = 3;
  spec.points = 300;
  spec.threads = 2;
  const auto sweep = landscape_sweep(spec);
  CHECK(sweep.instances.size() == 6);
  CHECK(sweep.violations() == 0);
  for (const auto& r : sweep.instances)
    for (const auto& v : r.violations) MESSAGE(v);
}

TEST_CASE("negative control: separation 2 pi / m breaks a clause") {
  const int m = 100;
  int failing = 0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const double d = 2 * kPi / m;
    const auto inst = make_landscape_instance(m, {1.0, 1.0 + d, 1.0 + 2 * d, 4.0}, 0.005, seed);
    const auto rep = check_landscape(inst, 300);
    if (!rep.pass()) {
      ++failing;
      MESSAGE("first broken clause: " << rep.violations.front());
    }
  }
  CHECK(failing == 3);
}

TEST_CASE("small runtime benchmark") {
  const auto t = runtime_benchmark(200, 0.1, 2, 5, EstimatorConfig{});
  REQUIRE(t.trials.size() == 2);
  CHECK(t.classical_mesh <= 0.1 * 0.1 * std::pow(200, -1.5) / 2 + 1e-15);
  for (const auto& r : t.trials) {
    CHECK(r.disagreement <= t.classical_mesh + 1e-6);
    CHECK(r.classical_evals > r.gradient_evals);
  }
  CHECK(t.measured_eval_ratio <= 2 * t.predicted_eval_ratio);
  CHECK(t.measured_eval_ratio >= t.predicted_eval_ratio / 2);
}

TEST_CASE("parallel_for covers every index once") {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(1000, 3, [&](int i) { hits[i]++; });
  for (auto& h : hits) CHECK(h.load() == 1);
}
