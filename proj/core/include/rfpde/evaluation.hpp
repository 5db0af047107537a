#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rfpde/solvers.hpp"

namespace rfpde {

enum class TestScheme { grid, uniform_random };

std::string to_string(TestScheme scheme);
/// Accepts "grid" and "random" (or "uniform-random").
TestScheme test_scheme_from_string(const std::string& name);
/// Grid for two-dimensional problems, uniform-random otherwise.
TestScheme default_test_scheme(const ProblemSpec& problem);

struct ErrorReport {
  double mse = 0.0;
  double max_abs = 0.0;
  Index n_test = 0;
  TestScheme scheme = TestScheme::grid;
  std::uint64_t seed = 0;
};

/// Test locations. For the grid scheme `n_test` is the count per axis and the
/// grid covers the closed box; for uniform-random it is the number of points.
MatrixXd test_points(const ProblemSpec& problem, TestScheme scheme, Index n_test, std::uint64_t seed);

/// Mean squared and maximum absolute difference of two equally sized vectors.
ErrorReport compare_values(const Eigen::Ref<const VectorXd>& truth, const Eigen::Ref<const VectorXd>& predicted);

/// Throws UnsupportedError when the problem has no manufactured solution.
ErrorReport test_error(const Model& model, const ProblemSpec& problem, TestScheme scheme, Index n_test,
                       std::uint64_t seed);

/// Least-squares line through (log x, log y).
struct PowerLawFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// False with fewer than two distinct x values or non-positive data.
  bool defined = false;
};

PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y);

struct FeatureConfig {
  FeatureDistribution distribution;
  Index n_features = 100;
  bool with_bias = true;
};

struct CollocationCounts {
  Index interior = 0;
  std::vector<Index> boundary;  // one per boundary group

  static CollocationCounts defaults(const ProblemSpec& problem);
  Index boundary_total() const;
};

/// One end-to-end run: sample features, sample collocation points, train,
/// measure the test error. Features, collocation and random test points use
/// independent streams derived from `seed`.
struct ExperimentResult {
  FitResult fit;
  ErrorReport error;
  double wall_time_seconds = 0.0;
};

ExperimentResult run_experiment(const ProblemSpec& problem, const FeatureConfig& features,
                                const CollocationCounts& counts, const SolverConfig& solver, std::uint64_t seed,
                                TestScheme scheme, Index n_test);

/// Stream indices used by run_experiment.
inline constexpr std::uint64_t kFeatureStream = 0;
inline constexpr std::uint64_t kCollocationStream = 1;
inline constexpr std::uint64_t kTestStream = 2;

enum class SweepKind { collocation, features, variance };

std::string to_string(SweepKind kind);
SweepKind sweep_kind_from_string(const std::string& name);

struct StudyRow {
  double swept_value = 0.0;
  int repetition = 0;
  std::uint64_t seed = 0;
  double mse = 0.0;
  /// False when the solve diverged; such rows are excluded from the fit.
  bool ok = true;
};

struct StudyResult {
  SweepKind kind = SweepKind::collocation;
  std::vector<StudyRow> rows;  // ordered by (swept value index, repetition)
  std::vector<double> values;
  std::vector<double> mean_mse;    // NaN where every repetition failed
  std::vector<double> median_mse;
  /// Fit of log(mean mse) against log(swept value).
  PowerLawFit fit;
  /// Variance sweeps have no convergence-rate interpretation.
  bool slope_meaningful = true;
  int failed_cells = 0;
};

struct StudyOptions {
  int repetitions = 10;
  std::uint64_t base_seed = 0;
  SolverConfig solver;
  TestScheme scheme = TestScheme::uniform_random;
  Index n_test = 100;
  /// Worker threads; 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
};

/// Sweeps collocation counts with fixed features; swept value is the
/// interior count. Repetition r uses seed base_seed + r in every cell.
StudyResult study_collocation(const ProblemSpec& problem, const FeatureConfig& features,
                              const std::vector<CollocationCounts>& counts, const StudyOptions& options);

StudyResult study_features(const ProblemSpec& problem, const FeatureConfig& features,
                           const std::vector<Index>& n_features, const CollocationCounts& counts,
                           const StudyOptions& options);

/// Requires a Gaussian feature distribution.
StudyResult study_variance(const ProblemSpec& problem, const FeatureConfig& features,
                           const std::vector<double>& variances, const CollocationCounts& counts,
                           const StudyOptions& options);

struct KernelCheckRow {
  Index n_features = 0;
  double rms_error = 0.0;
};

struct KernelCheckResult {
  std::vector<KernelCheckRow> rows;
  PowerLawFit fit;
};

/// RMS of approx_kernel - exact_kernel over `n_pairs` uniform pairs in
/// [0,1]^d, for each feature count. Uniform distributions are rejected.
KernelCheckResult kernel_check(const FeatureDistribution& dist, const std::vector<Index>& n_features,
                               Index n_pairs, std::uint64_t seed);

}  // namespace rfpde
