#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

#include "music/constants.hpp"
#include "music/harness.hpp"
#include "music/io.hpp"

using namespace music;

namespace {

constexpr int kExitEstimation = 1;
constexpr int kExitBadInput = 2;

// Flags that overlay an EstimatorConfig after the config file.
struct ConfigFlags {
  double gamma = 0, alpha = 0, spacing = 0, h = 0, epsilon = 0;
  int n = 0, n_min = 0, n_max = 0;
  std::string policy, svd, amplitude, file;
  std::vector<CLI::Option*> opts;

  void add(CLI::App* app) {
    app->add_option("--config", file, "JSON config file")->check(CLI::ExistingFile);
    opts = {app->add_option("--gamma", gamma, "sparsity threshold"),
            app->add_option("--alpha", alpha, "acceptance threshold"),
            app->add_option("--grid-spacing", spacing, "coarse grid spacing"),
            app->add_option("--step", h, "gradient step size h"),
            app->add_option("--n", n, "fixed number of gradient steps"),
            app->add_option("--policy", policy, "fixed or terminate"),
            app->add_option("--epsilon", epsilon, "termination tolerance"),
            app->add_option("--n-min", n_min, "minimum steps under termination"),
            app->add_option("--n-max", n_max, "maximum steps under termination"),
            app->add_option("--svd", svd, "auto, dense or iterative"),
            app->add_option("--amplitude", amplitude, "quadratic or least-squares")};
  }

  EstimatorConfig resolve() const {
    EstimatorConfig c;
    if (!file.empty()) {
      Json j = read_json_file(file);
      if (j.contains("config")) j = j["config"];
      apply_config_json(j, c);
    }
    Json over = Json::object();
    const char* keys[] = {"gamma", "alpha", "grid_spacing", "h", "n", "policy", "epsilon", "n_min", "n_max", "svd", "amplitude"};
    for (std::size_t i = 0; i < opts.size(); ++i) {
      if (!opts[i]->count()) continue;
      const std::string k = keys[i];
      if (k == "gamma") over[k] = gamma;
      else if (k == "alpha") over[k] = alpha;
      else if (k == "grid_spacing") over[k] = spacing;
      else if (k == "h") over[k] = h;
      else if (k == "n") over[k] = n;
      else if (k == "policy") over[k] = policy;
      else if (k == "epsilon") over[k] = epsilon;
      else if (k == "n_min") over[k] = n_min;
      else if (k == "n_max") over[k] = n_max;
      else if (k == "svd") over[k] = svd;
      else over[k] = amplitude;
    }
    apply_config_json(over, c);
    return c;
  }
};

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") std::cout << text;
  else write_text_file(path, text);
}

const char* kSlopePlot = R"(import csv, sys
import matplotlib.pyplot as plt

rows = list(csv.DictReader(open(sys.argv[1] if len(sys.argv) > 1 else "summary.csv")))
fig, axes = plt.subplots(1, 2, figsize=(10, 4))
for r in sorted({row["r"] for row in rows}, key=float):
    sel = [row for row in rows if row["r"] == r and row["frequency_percentile"]]
    m = [float(row["m"]) for row in sel]
    slope = sel[0]["frequency_slope"] if sel else ""
    axes[0].loglog(m, [float(row["frequency_percentile"]) for row in sel], "o-", label=f"r={r} slope={slope[:6]}")
    slope = sel[0]["amplitude_slope"] if sel else ""
    axes[1].loglog(m, [float(row["amplitude_percentile"]) for row in sel], "o-", label=f"r={r} slope={slope[:6]}")
axes[0].set_title("frequency error")
axes[1].set_title("amplitude error")
for ax in axes:
    ax.set_xlabel("m")
    ax.legend()
fig.tight_layout()
fig.savefig("slopes.png", dpi=150)
)";

const char* kRuntimePlot = R"(import csv, sys
import matplotlib.pyplot as plt

rows = [r for r in csv.DictReader(open(sys.argv[1] if len(sys.argv) > 1 else "runtime.csv")) if r["trial"] != "worst"]
cols = ["svd_seconds", "gradient_seconds", "classical_seconds"]
plt.boxplot([[float(r[c]) for r in rows] for c in cols], labels=["SVD", "Gradient-MUSIC", "classical MUSIC"])
plt.yscale("log")
plt.ylabel("seconds")
plt.savefig("runtime.png", dpi=150)
)";

std::string sibling(const std::string& path, const std::string& name) {
  const auto slash = path.find_last_of('/');
  return slash == std::string::npos ? name : path.substr(0, slash + 1) + name;
}

ExperimentSpec spec_from_json(const Json& j, const EstimatorConfig& base) {
  ExperimentSpec spec;
  spec.config = base;
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& k = it.key();
      const Json& v = it.value();
      if (k == "sigma") spec.sigma = v.get<double>();
      else if (k == "r") spec.r_values = v.is_array() ? v.get<std::vector<double>>() : std::vector<double>{v.get<double>()};
      else if (k == "m") spec.m_values = v.get<std::vector<int>>();
      else if (k == "m_range") spec.m_values = log_spaced(v.at("lo").get<int>(), v.at("hi").get<int>(), v.at("count").get<int>());
      else if (k == "trials") spec.trials = v.get<int>();
      else if (k == "percentile") spec.percentile = v.get<double>();
      else if (k == "seed") spec.seed = v.get<std::uint64_t>();
      else if (k == "diagnostics") spec.diagnostics = v.get<bool>();
      else if (k == "config") apply_config_json(v, spec.config);
      else if (k == "noise") {
        const NoiseModel n = noise_from_json(v);
        if (n.kind != NoiseModel::Kind::GaussianDiag)
          throw Error(ErrorKind::BadInput, "spec", "experiments need Gaussian noise");
        spec.sigma = n.sigma;
        spec.r_values = {n.r};
      } else if (k == "family") {
        const std::string kind = v.value("kind", "standard");
        if (kind == "standard") spec.family = SignalFamily::standard();
        else if (kind == "random")
          spec.family = SignalFamily::random(v.value("s", 3), v.value("separation", 8.0), v.value("a_min", 1.0),
                                             v.value("a_max", 1.0));
        else if (kind == "fixed") {
          spec.family = SignalFamily::standard();
          spec.family.x = v.at("x").get<std::vector<double>>();
          const auto re = v.at("a_re").get<std::vector<double>>();
          const auto im = v.value("a_im", std::vector<double>(re.size(), 0.0));
          spec.family.a.clear();
          for (std::size_t i = 0; i < re.size(); ++i) spec.family.a.emplace_back(re[i], i < im.size() ? im[i] : 0.0);
          spec.family.s = static_cast<int>(spec.family.x.size());
        } else throw Error(ErrorKind::BadInput, "spec", "unknown family kind '" + kind + "'");
      } else throw Error(ErrorKind::BadInput, "spec", "unknown spec key '" + k + "'");
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::BadInput, "spec", e.what());
  }
  if (spec.m_values.empty()) spec.m_values = log_spaced(100, 3162, 5);
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradient-MUSIC spectral estimation toolkit"};
  app.require_subcommand(1);
  int threads = 0;
  std::uint64_t seed = 1;
  app.add_option("--threads", threads, "worker threads for experiments (0 = all cores)");
  app.add_option("--seed", seed, "master seed")->envname("MUSIC_SEED");

  // estimate
  auto* est = app.add_subcommand("estimate", "estimate frequencies and amplitudes from samples");
  std::string est_input, est_output, est_truth;
  int est_s = 0;
  ConfigFlags est_cfg;
  est->add_option("--input", est_input, "samples CSV (k,re,im)")->required()->check(CLI::ExistingFile);
  est->add_option("--output", est_output, "result JSON (default stdout)");
  auto* est_s_opt = est->add_option("--s", est_s, "known number of frequencies (skips detection)")->check(CLI::PositiveNumber);
  est->add_option("--truth", est_truth, "ground-truth CSV; adds matching errors to the result")->check(CLI::ExistingFile);
  est_cfg.add(est);

  // simulate
  auto* sim = app.add_subcommand("simulate", "draw noisy samples from a known signal");
  int sim_m = 0, sim_s = 3;
  double sim_sigma = 0.0, sim_r = 0.0, sim_sep = 8.0, sim_amin = 1.0, sim_amax = 1.0;
  bool sim_random = false;
  std::string sim_out = "samples.csv", sim_truth_out = "truth.csv", sim_noise_out;
  sim->add_option("--m", sim_m, "number of samples per side")->required()->check(CLI::Range(2, 1 << 22));
  sim->add_option("--sigma", sim_sigma, "noise level")->check(CLI::NonNegativeNumber);
  sim->add_option("--r", sim_r, "covariance growth exponent");
  sim->add_flag("--random", sim_random, "random separated frequencies instead of the standard signal");
  sim->add_option("--s", sim_s, "frequencies for --random")->check(CLI::PositiveNumber);
  sim->add_option("--separation", sim_sep, "minimum separation in units of pi/m for --random");
  sim->add_option("--a-min", sim_amin, "smallest amplitude modulus for --random");
  sim->add_option("--a-max", sim_amax, "largest amplitude modulus for --random");
  sim->add_option("--out", sim_out, "samples CSV");
  sim->add_option("--truth", sim_truth_out, "ground-truth CSV");
  sim->add_option("--noise-out", sim_noise_out, "noise vector CSV");

  // bench-slopes
  auto* slopes = app.add_subcommand("bench-slopes", "Monte Carlo error-rate experiment with slope fits");
  std::string sl_spec, sl_out = "results.csv", sl_summary, sl_plot;
  ConfigFlags sl_cfg;
  slopes->add_option("--spec", sl_spec, "experiment spec JSON")->check(CLI::ExistingFile);
  slopes->add_option("--out", sl_out, "per-trial CSV");
  slopes->add_option("--summary", sl_summary, "summary CSV (default summary.csv next to --out)");
  slopes->add_option("--plot-script", sl_plot, "plotting script path (default plot_slopes.py next to --out)");
  sl_cfg.add(slopes);

  // bench-runtime
  auto* rt = app.add_subcommand("bench-runtime", "wall-time comparison against classical MUSIC");
  int rt_m = 1000, rt_trials = 10;
  double rt_sigma = 0.01, rt_spacing = 0.0;
  std::string rt_out = "runtime.csv", rt_plot;
  ConfigFlags rt_cfg;
  rt->add_option("--m", rt_m, "number of samples per side")->check(CLI::Range(2, 1 << 22));
  rt->add_option("--sigma", rt_sigma, "noise level")->check(CLI::PositiveNumber);
  rt->add_option("--trials", rt_trials, "trials")->check(CLI::PositiveNumber);
  rt->add_option("--classical-spacing", rt_spacing, "classical grid spacing (default 0.1 sigma m^-1.5)");
  rt->add_option("--out", rt_out, "timing CSV");
  rt->add_option("--plot-script", rt_plot, "plotting script path (default plot_runtime.py next to --out)");
  rt_cfg.add(rt);

  // certify-constants
  auto* cert = app.add_subcommand("certify-constants", "certify the landscape constants numerically");
  CertificationInput ci;
  std::string cert_kernel = "corrected", cert_json;
  cert->add_option("--m0", ci.m0, "smallest m covered")->check(CLI::PositiveNumber);
  cert->add_option("--beta", ci.beta, "separation factor, Delta >= 2 pi beta / m");
  cert->add_option("--theta", ci.theta, "sine-theta bound");
  cert->add_option("--r", ci.r, "critical-point radius factor");
  cert->add_option("--kernel", cert_kernel, "corrected or printed derivative envelopes");
  cert->add_flag("--compare-published", ci.compare_published, "require the published 3-digit constants");
  cert->add_option("--json", cert_json, "also write the report as JSON");

  // landscape
  auto* land = app.add_subcommand("landscape", "dump the landscape function or run the invariant sweep");
  std::string la_input, la_out = "-";
  int la_s = 0, la_points = 0;
  bool la_sweep = false;
  SweepSpec sw;
  land->add_option("--input", la_input, "samples CSV to build the landscape from")->check(CLI::ExistingFile);
  auto* la_s_opt = land->add_option("--s", la_s, "known number of frequencies")->check(CLI::PositiveNumber);
  land->add_option("--points", la_points, "uniform grid size (default 8m)")->check(CLI::PositiveNumber);
  land->add_option("--out", la_out, "CSV output (t,q,dq,d2q,accepted), - for stdout");
  land->add_flag("--sweep", la_sweep, "run the randomized invariant sweep instead");
  land->add_option("--count", sw.count, "sweep instances")->check(CLI::PositiveNumber);
  land->add_option("--m-list", sw.m_values, "sweep m values");
  land->add_option("--separation", sw.separation, "sweep minimum separation in units of pi/m");
  land->add_option("--theta-max", sw.theta_max, "largest sweep sine-theta");
  land->add_option("--window-points", sw.points, "samples per checked window");
  ConfigFlags la_cfg;
  la_cfg.add(land);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitBadInput;
  }

  try {
    if (*est) {
      const EstimatorConfig config = est_cfg.resolve();
      const SampleVector y = read_samples_csv(est_input);
      std::optional<int> known;
      if (est_s_opt->count()) known = est_s;
      const EstimationResult r = full_pipeline(y, config, known);
      Json j = result_to_json(r);
      if (!est_truth.empty()) {
        const SignalParams truth = read_truth_csv(est_truth);
        if (truth.size() == r.frequencies.size()) {
          const Matching match = matching_distance(truth.frequencies, r.frequencies);
          double amp = 0.0;
          for (std::size_t i = 0; i < truth.size(); ++i)
            amp = std::max(amp, std::abs(truth.amplitudes[i] - r.amplitudes[static_cast<std::size_t>(match.perm[i])]));
          j["frequency_error"] = match.error;
          j["amplitude_error"] = amp;
        } else {
          j["frequency_error"] = nullptr;
          j["amplitude_error"] = nullptr;
        }
      }
      emit(est_output, dump_json(j));
      return 0;
    }
    if (*sim) {
      SignalFamily fam = sim_random ? SignalFamily::random(sim_s, sim_sep, sim_amin, sim_amax) : SignalFamily::standard();
      fam.validate();
      CounterRng rng(seed, 1ULL << 63);
      const SignalParams truth = fam.sample(sim_m, rng);
      const SampleVector eta = draw(NoiseModel::gaussian(sim_sigma, sim_r), sim_m, seed, 0);
      write_samples_csv(sim_out, synthesize(truth, sim_m) + eta);
      write_truth_csv(sim_truth_out, truth);
      if (!sim_noise_out.empty()) write_samples_csv(sim_noise_out, eta);
      return 0;
    }
    if (*slopes) {
      const EstimatorConfig base = sl_cfg.resolve();
      ExperimentSpec spec = sl_spec.empty() ? spec_from_json(Json::object(), base) : spec_from_json(read_json_file(sl_spec), base);
      if (!sl_spec.empty()) {
        const Json j = read_json_file(sl_spec);
        if (!j.contains("seed")) spec.seed = seed;
      } else {
        spec.seed = seed;
      }
      spec.threads = threads;
      const ExperimentResult res = run_experiment(spec);
      write_trials_csv(sl_out, res.trials);
      const std::string summary = sl_summary.empty() ? sibling(sl_out, "summary.csv") : sl_summary;
      write_summary_csv(summary, res);
      write_text_file(sl_plot.empty() ? sibling(sl_out, "plot_slopes.py") : sl_plot, kSlopePlot);
      for (const auto& f : res.slopes) {
        if (f.fitted)
          std::printf("r=%g frequency slope %.4f (expected %.4f), amplitude slope %.4f (expected %.4f)\n", f.r,
                      f.frequency_slope, -1.5 + f.r, f.amplitude_slope, -0.5 + f.r);
        else
          std::printf("r=%g slope fit skipped\n", f.r);
      }
      return 0;
    }
    if (*rt) {
      const EstimatorConfig config = rt_cfg.resolve();
      const RuntimeTable table = runtime_benchmark(rt_m, rt_sigma, rt_trials, seed, config, rt_spacing);
      write_runtime_csv(rt_out, table);
      write_text_file(rt_plot.empty() ? sibling(rt_out, "plot_runtime.py") : rt_plot, kRuntimePlot);
      std::printf("%-18s %14s\n", "stage", "worst seconds");
      std::printf("%-18s %14.6f\n", "SVD", table.worst_svd);
      std::printf("%-18s %14.6f\n", "Gradient-MUSIC", table.worst_gradient);
      std::printf("%-18s %14.6f\n", "classical MUSIC", table.worst_classical);
      std::printf("speedup %.1fx, eval ratio measured %.1f predicted %.1f\n",
                  table.worst_classical / table.worst_gradient, table.measured_eval_ratio, table.predicted_eval_ratio);
      return 0;
    }
    if (*cert) {
      ci.form = parse_kernel_form(cert_kernel);
      const CertificationReport rep = certify(ci);
      std::cout << rep.table();
      if (!cert_json.empty()) {
        Json j;
        j["m0"] = ci.m0;
        j["beta"] = ci.beta;
        j["theta"] = ci.theta;
        j["r"] = ci.r;
        j["all_pass"] = rep.all_pass();
        Json lines = Json::array();
        for (const auto& l : rep.lines) {
          Json e{{"name", l.name}, {"value", l.value}, {"error", l.error}, {"pass", l.pass}, {"note", l.note}};
          if (l.has_target) {
            e["target"] = l.target;
            e["rounded"] = l.rounded;
          }
          lines.push_back(e);
        }
        j["lines"] = lines;
        write_text_file(cert_json, dump_json(j));
      }
      return rep.all_pass() ? 0 : kExitEstimation;
    }
    if (*land) {
      if (la_sweep) {
        sw.seed = seed;
        sw.threads = threads;
        const SweepReport rep = landscape_sweep(sw);
        std::ostringstream os;
        os << "seed,m,s,theta,violations\n";
        for (const auto& r : rep.instances) {
          os << r.seed << ',' << r.m << ',' << r.s << ',' << format_double(r.theta) << ',';
          for (std::size_t i = 0; i < r.violations.size(); ++i) os << (i ? " | " : "") << r.violations[i];
          os << '\n';
        }
        emit(la_out, os.str());
        std::fprintf(stderr, "%zu instances, %d violations\n", rep.instances.size(), rep.violations());
        return rep.violations() == 0 ? 0 : kExitEstimation;
      }
      if (la_input.empty()) throw Error(ErrorKind::BadInput, "landscape", "--input or --sweep is required");
      const EstimatorConfig config = la_cfg.resolve();
      const SampleVector y = read_samples_csv(la_input);
      const ToeplitzMatrix t = toeplitz(y);
      int s = la_s;
      SingularSpectrum spec;
      if (la_s_opt->count()) {
        spec = leading_svd(t, s + 1, 0.0, config.svd);
      } else {
        spec = leading_svd(t, 1, config.gamma, config.svd);
        s = detect_sparsity(spec, config.gamma);
      }
      const Landscape q(toeplitz_estimator(spec, s));
      const int count = la_points > 0 ? la_points : 8 * y.m();
      std::ostringstream os;
      os << "t,q,dq,d2q,accepted\n";
      for (int i = 0; i < count; ++i) {
        const double u = kTwoPi * i / count;
        const auto p = q.evaluate(u, 2);
        os << format_double(u) << ',' << format_double(p.q) << ',' << format_double(p.dq) << ','
           << format_double(p.d2q) << ',' << (p.q < config.alpha ? 1 : 0) << '\n';
      }
      emit(la_out, os.str());
      return 0;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error [%s/%s]: %s\n", e.stage().c_str(), to_string(e.kind()), e.what());
    return e.is_input_error() ? kExitBadInput : kExitEstimation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitEstimation;
  }
  return 0;
}
