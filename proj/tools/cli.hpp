#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rfpde/evaluation.hpp"

namespace rfpde::cli {

/// Exit statuses of run().
inline constexpr int kOk = 0;
inline constexpr int kRuntimeFailure = 1;
inline constexpr int kUsageError = 2;

/// Everything a command needs, as parsed from flags and the config file.
struct RunConfig {
  std::string problem;
  Index dim = 2;
  double frequency = 1.0;

  std::string dist = "gaussian";
  double sigma2 = 1.0;
  double gamma = 1.0;
  double uniform_r = 0.05;
  Index n_features = 100;
  bool with_bias = true;

  std::optional<Index> m_interior;
  std::vector<Index> m_boundary;  // one per boundary group; empty means defaults

  std::string solver = "gauss-newton";
  double mu = 1e-8;
  double lambda_interior = 1.0;
  std::optional<double> lambda_boundary;
  int epochs = 100;
  double step = 1e-3;
  double tol = 1e-10;

  std::string test_scheme;  // empty picks per command
  std::optional<Index> n_test;
  std::uint64_t seed = 0;
  std::string out;
  std::string points_out;

  // study
  std::string sweep;
  std::vector<double> values;
  std::vector<Index> boundary_values;
  int reps = 10;
  unsigned threads = 0;

  // kernel-check
  std::vector<Index> n_list{100, 400, 1600, 6400};
  Index n_pairs = 100;
};

/// Resolved inputs of a solve or study run. Construction validates every
/// field and throws ParameterError (or ShapeError) before anything runs.
struct ResolvedRun {
  ProblemSpec problem;
  FeatureConfig features;
  CollocationCounts counts;
  SolverConfig solver;
  TestScheme scheme = TestScheme::grid;
  Index n_test = 0;
};

FeatureDistribution resolve_distribution(const RunConfig& cfg, Index dim);
ResolvedRun resolve(const RunConfig& cfg, bool study);

/// Entry point: `rfpde <solve|study|kernel-check> [flags]`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rfpde::cli
