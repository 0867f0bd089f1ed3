#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "music/amplitude.hpp"
#include "music/landscape.hpp"
#include "music/subspace.hpp"

namespace music {

enum class IterationPolicy { FixedN, Terminate };

struct EstimatorConfig {
  double gamma = 0.0525;
  double alpha = 0.529;
  double grid_spacing = 0.0;  // 0 selects 1 / (2m)
  double step = 0.0;          // 0 selects 6 / m^2
  IterationPolicy policy = IterationPolicy::FixedN;
  int n = 0;                  // fixed-n step count; 0 selects it from the plug-in subspace error
  double epsilon = 0.0;       // termination tolerance; 0 selects 0.01 / m
  int n_min = 31;
  int n_max = 300;
  SvdMethod svd = SvdMethod::Auto;
  AmplitudeMethod amplitude = AmplitudeMethod::Quadratic;

  double spacing_for(int m) const { return grid_spacing > 0 ? grid_spacing : 1.0 / (2.0 * m); }
  double step_for(int m) const { return step > 0 ? step : 6.0 / (static_cast<double>(m) * m); }
  double epsilon_for(int m) const { return epsilon > 0 ? epsilon : 0.01 / m; }
  // Throws Domain when a parameter leaves the range the guarantees need.
  void validate(int m) const;
};

// n = max(31, ceil(6 log(15 / theta))), theta clamped to at least 1e-16.
int auto_iterations(double theta);

// Points on the torus, either uniform (offset + 2 pi i / count) or explicit and sorted.
class Grid {
 public:
  static Grid uniform(long long count, double offset = 0.0);
  static Grid from_points(std::vector<double> points);

  long long size() const { return uniform_ ? count_ : static_cast<long long>(points_.size()); }
  double point(long long i) const;
  bool is_uniform() const { return uniform_; }
  double offset() const { return offset_; }
  // Exact covering radius max_t min_u |t - u|.
  double mesh() const { return mesh_; }

 private:
  bool uniform_ = true;
  long long count_ = 0;
  double offset_ = 0.0;
  std::vector<double> points_;
  double mesh_ = 0.0;
};

// Uniform grid with spacing at most 2 * target_mesh. Very large grids are rounded up
// to a multiple of 2^14 points so the scan can stream them in FFT rows.
Grid make_grid(int m, double target_mesh);

// Indices i with q(G[i]) < alpha. `values`, when given, receives q on the whole grid.
std::vector<long long> threshold_accept(const Landscape& q, const Grid& g, double alpha,
                                        std::vector<double>* values = nullptr);

struct Cluster {
  std::vector<long long> indices;  // in circular order
  long long representative = 0;
};

// Maximal runs of consecutive accepted indices, merged across the seam.
std::vector<Cluster> find_clusters(const std::vector<long long>& accepted, const Grid& g);

struct DescentResult {
  double x = 0.0;
  int iterations = 0;
  int gradient_evals = 0;
  bool flagged = false;  // termination policy ran out of steps
};

// n_fixed is the step count under the fixed-n policy.
DescentResult descend(const Landscape& q, double t0, const EstimatorConfig& config, int n_fixed);

struct EvalCounters {
  long long grid_evals = 0;
  long long gradient_evals = 0;
};

struct GradientMusicResult {
  std::vector<double> frequencies;  // ascending in [0, 2pi)
  std::vector<int> iterations;
  std::vector<bool> flagged;
  int n_used = 0;
  long long grid_size = 0;
  EvalCounters counters;
};

// theta_hat drives the automatic step count when config.n is 0; NaN means unknown
// and falls back to the largest automatic count.
GradientMusicResult gradient_music(const Subspace& w, const EstimatorConfig& config,
                                   double theta_hat = std::numeric_limits<double>::quiet_NaN());

struct ClassicalResult {
  std::vector<double> frequencies;  // ascending
  std::vector<double> values;       // q at each returned frequency
  long long evals = 0;
};

// The s strict discrete local minima of q on g with the smallest values.
ClassicalResult classical_music(const Subspace& w, int s, const Grid& g);

struct StageTimes {
  double svd = 0.0;
  double music = 0.0;
  double amplitude = 0.0;
};

struct EstimationResult {
  int s_hat = 0;
  std::vector<double> frequencies;
  std::vector<cdouble> amplitudes;
  std::vector<int> iterations;
  std::vector<bool> flagged;
  Eigen::VectorXd singular_values;
  double theta_hat = 0.0;  // sigma_{s+1} / sigma_s
  int n_used = 0;
  EvalCounters counters;
  StageTimes seconds;
  Subspace subspace;
};

// Sparsity detection (skipped when known_s is set), subspace estimate, Gradient-MUSIC,
// amplitude recovery.
EstimationResult full_pipeline(const SampleVector& y, const EstimatorConfig& config,
                               std::optional<int> known_s = std::nullopt);

}  // namespace music
