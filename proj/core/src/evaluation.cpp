#include "rfpde/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>

#include "rfpde/errors.hpp"
#include "rfpde/rng.hpp"

namespace rfpde {

std::string to_string(TestScheme scheme) {
  return scheme == TestScheme::grid ? "grid" : "random";
}

TestScheme test_scheme_from_string(const std::string& name) {
  if (name == "grid") return TestScheme::grid;
  if (name == "random" || name == "uniform-random") return TestScheme::uniform_random;
  throw ParameterError("unknown test scheme '" + name + "'");
}

TestScheme default_test_scheme(const ProblemSpec& problem) {
  return problem.dim() == 2 ? TestScheme::grid : TestScheme::uniform_random;
}

MatrixXd test_points(const ProblemSpec& problem, TestScheme scheme, Index n_test, std::uint64_t seed) {
  if (n_test < 1) throw ParameterError("test_points: need at least one test point");
  if (scheme == TestScheme::grid) return box_grid(problem.domain, n_test);
  Rng rng(seed);
  return sample_box_uniform(problem.domain, n_test, rng);
}

ErrorReport compare_values(const Eigen::Ref<const VectorXd>& truth, const Eigen::Ref<const VectorXd>& predicted) {
  if (truth.size() != predicted.size()) throw ShapeError("compare_values: size mismatch");
  if (truth.size() == 0) throw EmptySetError("compare_values: no values");
  const Eigen::ArrayXd diff = (truth - predicted).array();
  ErrorReport out;
  out.mse = diff.square().mean();
  out.max_abs = diff.abs().maxCoeff();
  out.n_test = truth.size();
  return out;
}

ErrorReport test_error(const Model& model, const ProblemSpec& problem, TestScheme scheme, Index n_test,
                       std::uint64_t seed) {
  if (!problem.true_solution) {
    throw UnsupportedError("test_error: problem '" + problem.name + "' has no manufactured solution");
  }
  const MatrixXd pts = test_points(problem, scheme, n_test, seed);
  VectorXd truth(pts.rows());
  for (Index j = 0; j < pts.rows(); ++j) truth(j) = problem.true_solution->value(pts.row(j).transpose());
  ErrorReport out = compare_values(truth, model_values(model, pts));
  out.scheme = scheme;
  out.seed = seed;
  return out;
}

PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ShapeError("fit_power_law: x and y differ in length");
  PowerLawFit fit;
  if (x.size() < 2) return fit;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(x[i]) || !std::isfinite(y[i])) return fit;
  }
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  if (sxx == 0.0) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.defined = true;
  return fit;
}

CollocationCounts CollocationCounts::defaults(const ProblemSpec& problem) {
  CollocationCounts counts{problem.default_interior_points, {}};
  for (const auto& g : problem.boundary_groups) counts.boundary.push_back(g.default_points);
  return counts;
}

Index CollocationCounts::boundary_total() const {
  Index n = 0;
  for (Index b : boundary) n += b;
  return n;
}

ExperimentResult run_experiment(const ProblemSpec& problem, const FeatureConfig& features,
                                const CollocationCounts& counts, const SolverConfig& solver, std::uint64_t seed,
                                TestScheme scheme, Index n_test) {
  const auto start = std::chrono::steady_clock::now();
  FeatureDistribution dist = features.distribution;
  dist.dim = problem.dim();
  const FeatureSet fs =
      sample_features(dist, features.n_features, derive_seed(seed, kFeatureStream), features.with_bias);
  const CollocationSet pts =
      sample_collocation(problem, counts.interior, counts.boundary, derive_seed(seed, kCollocationStream));

  ExperimentResult out;
  out.fit = fit(problem, fs, pts, solver);
  out.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.error = test_error(out.fit.model, problem, scheme, n_test, derive_seed(seed, kTestStream));
  return out;
}

std::string to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::collocation:
      return "collocation";
    case SweepKind::features:
      return "features";
    case SweepKind::variance:
      return "variance";
  }
  return "unknown";
}

SweepKind sweep_kind_from_string(const std::string& name) {
  if (name == "collocation") return SweepKind::collocation;
  if (name == "features") return SweepKind::features;
  if (name == "variance") return SweepKind::variance;
  throw ParameterError("unknown sweep kind '" + name + "'");
}

namespace {

struct Cell {
  FeatureConfig features;
  CollocationCounts counts;
  double swept_value;
};

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

StudyResult run_study(SweepKind kind, const ProblemSpec& problem, const std::vector<Cell>& cells,
                      const StudyOptions& options) {
  if (cells.empty()) throw EmptySetError("study: no swept values");
  if (options.repetitions < 1) throw ParameterError("study: repetitions must be >= 1");
  options.solver.validate();

  const auto reps = static_cast<std::size_t>(options.repetitions);
  StudyResult result;
  result.kind = kind;
  result.rows.resize(cells.size() * reps);

  parallel_for(result.rows.size(), options.threads, [&](std::size_t idx) {
    const Cell& cell = cells[idx / reps];
    const auto rep = static_cast<int>(idx % reps);
    StudyRow& row = result.rows[idx];
    row.swept_value = cell.swept_value;
    row.repetition = rep;
    row.seed = options.base_seed + static_cast<std::uint64_t>(rep);
    try {
      const auto run = run_experiment(problem, cell.features, cell.counts, options.solver, row.seed,
                                      options.scheme, options.n_test);
      row.mse = run.error.mse;
      row.ok = std::isfinite(row.mse);
    } catch (const DivergenceError&) {
      row.ok = false;
    }
    if (!row.ok) row.mse = std::numeric_limits<double>::quiet_NaN();
  });

  std::vector<double> fit_x, fit_y;
  for (std::size_t v = 0; v < cells.size(); ++v) {
    std::vector<double> good;
    for (std::size_t r = 0; r < reps; ++r) {
      const StudyRow& row = result.rows[v * reps + r];
      if (row.ok) {
        good.push_back(row.mse);
      } else {
        ++result.failed_cells;
      }
    }
    double mean = std::numeric_limits<double>::quiet_NaN();
    if (!good.empty()) {
      mean = 0.0;
      for (double m : good) mean += m;
      mean /= static_cast<double>(good.size());
      fit_x.push_back(cells[v].swept_value);
      fit_y.push_back(mean);
    }
    result.values.push_back(cells[v].swept_value);
    result.mean_mse.push_back(mean);
    result.median_mse.push_back(median(std::move(good)));
  }
  result.fit = fit_power_law(fit_x, fit_y);
  return result;
}

}  // namespace

StudyResult study_collocation(const ProblemSpec& problem, const FeatureConfig& features,
                              const std::vector<CollocationCounts>& counts, const StudyOptions& options) {
  std::vector<Cell> cells;
  for (const auto& c : counts) cells.push_back({features, c, static_cast<double>(c.interior)});
  return run_study(SweepKind::collocation, problem, cells, options);
}

StudyResult study_features(const ProblemSpec& problem, const FeatureConfig& features,
                           const std::vector<Index>& n_features, const CollocationCounts& counts,
                           const StudyOptions& options) {
  std::vector<Cell> cells;
  for (Index n : n_features) {
    if (n < 1) throw ParameterError("study_features: feature counts must be >= 1");
    FeatureConfig fc = features;
    fc.n_features = n;
    cells.push_back({fc, counts, static_cast<double>(n)});
  }
  return run_study(SweepKind::features, problem, cells, options);
}

StudyResult study_variance(const ProblemSpec& problem, const FeatureConfig& features,
                           const std::vector<double>& variances, const CollocationCounts& counts,
                           const StudyOptions& options) {
  if (features.distribution.kind != DistributionKind::gaussian) {
    throw UnsupportedError("study_variance: requires Gaussian features");
  }
  std::vector<Cell> cells;
  for (double v : variances) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ParameterError("study_variance: variances must be positive");
    FeatureConfig fc = features;
    fc.distribution.parameter = v;
    cells.push_back({fc, counts, v});
  }
  StudyResult result = run_study(SweepKind::variance, problem, cells, options);
  result.slope_meaningful = false;
  return result;
}

KernelCheckResult kernel_check(const FeatureDistribution& dist, const std::vector<Index>& n_features,
                               Index n_pairs, std::uint64_t seed) {
  if (dist.kind == DistributionKind::uniform) {
    throw UnsupportedError("kernel_check: the uniform law has no matched kernel");
  }
  dist.validate();
  if (n_pairs < 1) throw ParameterError("kernel_check: need at least one point pair");
  if (n_features.empty()) throw EmptySetError("kernel_check: no feature counts");

  Rng rng(derive_seed(seed, 1));
  MatrixXd left(n_pairs, dist.dim), right(n_pairs, dist.dim);
  for (Index p = 0; p < n_pairs; ++p) {
    for (Index i = 0; i < dist.dim; ++i) left(p, i) = rng.uniform();
    for (Index i = 0; i < dist.dim; ++i) right(p, i) = rng.uniform();
  }
  VectorXd exact(n_pairs);
  for (Index p = 0; p < n_pairs; ++p) exact(p) = exact_kernel(dist, left.row(p).transpose(), right.row(p).transpose());

  KernelCheckResult out;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < n_features.size(); ++i) {
    const Index n = n_features[i];
    const FeatureSet fs = sample_features(dist, n, derive_seed(seed, 2 + i));
    const MatrixXd cl = eval_feature_block(fs, left).cos;
    const MatrixXd cr = eval_feature_block(fs, right).cos;
    const VectorXd approx = 2.0 * (cl.array() * cr.array()).rowwise().sum().matrix() / static_cast<double>(n);
    const double rms = std::sqrt((approx - exact).squaredNorm() / static_cast<double>(n_pairs));
    out.rows.push_back({n, rms});
    xs.push_back(static_cast<double>(n));
    ys.push_back(rms);
  }
  out.fit = fit_power_law(xs, ys);
  return out;
}

}  // namespace rfpde
