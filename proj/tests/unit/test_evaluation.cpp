#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "rfpde/errors.hpp"
#include "rfpde/evaluation.hpp"

namespace rfpde {
namespace {

TEST(PowerLaw, ExactSlopeMinusOne) {
  const std::vector<double> x{100, 400, 1600};
  const std::vector<double> y{1e-2, 2.5e-3, 6.25e-4};
  const auto fit = fit_power_law(x, y);
  ASSERT_TRUE(fit.defined);
  EXPECT_NEAR(fit.slope, -1.0, 1e-10);
  EXPECT_NEAR(fit.intercept, 0.0, 1e-10);
}

TEST(PowerLaw, RecoversRandomExponents) {
  for (double p : {-2.5, -0.5, 0.0, 1.3}) {
    std::vector<double> x{3, 7, 50, 900};
    std::vector<double> y;
    for (double v : x) y.push_back(4.2 * std::pow(v, p));
    const auto fit = fit_power_law(x, y);
    EXPECT_NEAR(fit.slope, p, 1e-10);
    EXPECT_NEAR(fit.intercept, std::log(4.2), 1e-10);
  }
}

TEST(PowerLaw, TwoPointsAndAgreementWithOracle) {
  const std::vector<double> x{10, 1000};
  const std::vector<double> y{1.0, 1e-4};
  EXPECT_NEAR(fit_power_law(x, y).slope, -2.0, 1e-12);
  const std::vector<double> xs{1, 2, 3, 5, 8};
  const std::vector<double> ys{0.9, 0.3, 0.35, 0.1, 0.02};
  EXPECT_NEAR(fit_power_law(xs, ys).slope, testing::loglog_slope(xs, ys), 1e-10);
}

TEST(PowerLaw, Undefined) {
  EXPECT_FALSE(fit_power_law(std::vector<double>{5}, std::vector<double>{1}).defined);
  EXPECT_FALSE(fit_power_law(std::vector<double>{5, 5}, std::vector<double>{1, 2}).defined);
  EXPECT_FALSE(fit_power_law(std::vector<double>{1, 2}, std::vector<double>{0, 2}).defined);
}

TEST(CompareValues, Arithmetic) {
  VectorXd truth(2), pred(2);
  truth << 1.0, 1.0;
  pred << 2.0, 0.0;
  auto r = compare_values(truth, pred);
  EXPECT_DOUBLE_EQ(r.mse, 1.0);
  EXPECT_DOUBLE_EQ(r.max_abs, 1.0);
  r = compare_values(VectorXd::Ones(5), VectorXd::Zero(5));
  EXPECT_DOUBLE_EQ(r.mse, 1.0);
  r = compare_values(VectorXd::Ones(5), VectorXd::Ones(5));
  EXPECT_EQ(r.mse, 0.0);
  EXPECT_THROW(compare_values(VectorXd::Ones(2), VectorXd::Ones(3)), ShapeError);
}

TEST(TestPoints, GridIncludesCorners) {
  const auto p = builtin_nonlinear_elliptic();
  const MatrixXd g = test_points(p, TestScheme::grid, 100, 0);
  EXPECT_EQ(g.rows(), 10000);
  EXPECT_EQ(g.minCoeff(), 0.0);
  EXPECT_EQ(g.maxCoeff(), 1.0);
  EXPECT_EQ(default_test_scheme(p), TestScheme::grid);
  EXPECT_EQ(default_test_scheme(builtin_nonlinear_poisson(8)), TestScheme::uniform_random);
}

TEST(TestPoints, RandomDeterministicInDomain) {
  const auto p = builtin_nonlinear_poisson(4);
  const MatrixXd a = test_points(p, TestScheme::uniform_random, 100, 5);
  const MatrixXd b = test_points(p, TestScheme::uniform_random, 100, 5);
  EXPECT_EQ(a.rows(), 100);
  EXPECT_EQ(a.cols(), 4);
  EXPECT_TRUE((a.array() == b.array()).all());
  EXPECT_GE(a.minCoeff(), -1.0);
  EXPECT_LE(a.maxCoeff(), 1.0);
}

TEST(TestError, ExactInterpolantHasZeroError) {
  // u = cos(x + y) is one feature with w = (1, 1), b = 0
  ProblemSpec p = builtin_linear_elliptic();
  p.true_solution->value = [](const VectorXd& x) { return std::cos(x(0) + x(1)); };
  FeatureSet fs;
  fs.weights = Eigen::RowVector2d(1.0, 1.0);
  fs.biases = VectorXd::Zero(1);
  fs.distribution = FeatureDistribution::gaussian(1.0, 2);
  const auto r = test_error({fs, VectorXd::Ones(1)}, p, TestScheme::grid, 20, 0);
  EXPECT_LE(r.mse, 1e-30);
  EXPECT_EQ(r.n_test, 400);
  p.true_solution.reset();
  EXPECT_THROW(test_error({fs, VectorXd::Ones(1)}, p, TestScheme::grid, 20, 0), UnsupportedError);
}

TEST(Names, RoundTrip) {
  for (auto k : {SweepKind::collocation, SweepKind::features, SweepKind::variance})
    EXPECT_EQ(sweep_kind_from_string(to_string(k)), k);
  EXPECT_EQ(test_scheme_from_string("grid"), TestScheme::grid);
  EXPECT_EQ(test_scheme_from_string("random"), TestScheme::uniform_random);
  EXPECT_THROW(test_scheme_from_string("sobol"), ParameterError);
}

FeatureConfig small_features() { return {FeatureDistribution::gaussian(100.0, 2), 40, true}; }

StudyOptions small_options() {
  StudyOptions o;
  o.repetitions = 3;
  o.base_seed = 50;
  o.solver.max_iterations = 10;
  o.threads = 2;
  return o;
}

TEST(Study, FeatureSweepDeterministicAndDistinctSeeds) {
  const auto p = builtin_nonlinear_elliptic();
  const CollocationCounts counts{100, {40}};
  const auto a = study_features(p, small_features(), {20, 40}, counts, small_options());
  auto single = small_options();
  single.threads = 1;
  const auto b = study_features(p, small_features(), {20, 40}, counts, single);
  ASSERT_EQ(a.rows.size(), 6u);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].mse, b.rows[i].mse);
    EXPECT_EQ(a.rows[i].seed, b.rows[i].seed);
    EXPECT_EQ(a.rows[i].seed, 50u + static_cast<std::uint64_t>(a.rows[i].repetition));
  }
  std::set<double> cell0{a.rows[0].mse, a.rows[1].mse, a.rows[2].mse};
  EXPECT_EQ(cell0.size(), 3u);
  EXPECT_EQ(a.values, (std::vector<double>{20, 40}));
  const double mean0 = (a.rows[0].mse + a.rows[1].mse + a.rows[2].mse) / 3.0;
  EXPECT_NEAR(a.mean_mse[0], mean0, 1e-15 * mean0);
  EXPECT_TRUE(a.fit.defined);
  EXPECT_TRUE(a.slope_meaningful);
  EXPECT_EQ(a.failed_cells, 0);
}

TEST(Study, CollocationSweepUsesInteriorCount) {
  const auto p = builtin_nonlinear_elliptic();
  std::vector<CollocationCounts> counts{{50, {20}}, {120, {40}}};
  auto o = small_options();
  o.repetitions = 1;
  const auto r = study_collocation(p, small_features(), counts, o);
  EXPECT_EQ(r.values, (std::vector<double>{50, 120}));
  EXPECT_EQ(r.kind, SweepKind::collocation);
}

TEST(Study, VarianceSweepRules) {
  const auto p = builtin_nonlinear_poisson(2);
  const CollocationCounts counts{60, {20}};
  auto o = small_options();
  o.repetitions = 1;
  FeatureConfig f{FeatureDistribution::gaussian(1.0, 2), 20, true};
  const auto one = study_variance(p, f, {1.0}, counts, o);
  EXPECT_EQ(one.rows.size(), 1u);
  EXPECT_FALSE(one.fit.defined);
  EXPECT_FALSE(one.slope_meaningful);
  EXPECT_THROW(study_variance(p, f, {1.0, 0.0}, counts, o), ParameterError);
  EXPECT_THROW(study_variance(p, f, {1.0, -2.0}, counts, o), ParameterError);
  FeatureConfig lap{FeatureDistribution::laplace(1.0, 2), 20, true};
  EXPECT_THROW(study_variance(p, lap, {1.0}, counts, o), UnsupportedError);
  EXPECT_THROW(study_variance(p, f, {}, counts, o), EmptySetError);
}

TEST(Study, DivergedCellsExcluded) {
  const auto p = builtin_linear_elliptic();
  const CollocationCounts counts{60, {20}};
  auto o = small_options();
  o.repetitions = 2;
  o.solver.method = SolverMethod::gradient_descent;
  o.solver.step_size = 1e3;
  o.solver.max_iterations = 100000;
  const auto r = study_features(p, small_features(), {10, 20}, counts, o);
  EXPECT_EQ(r.failed_cells, 4);
  for (const auto& row : r.rows) EXPECT_FALSE(row.ok);
  EXPECT_FALSE(r.fit.defined);
}

TEST(RunExperiment, IndependentStreams) {
  const auto p = builtin_linear_elliptic();
  SolverConfig cfg;
  cfg.method = SolverMethod::linear_ls;
  const FeatureConfig f{FeatureDistribution::gaussian(4.0, 2), 50, true};
  const auto r = run_experiment(p, f, CollocationCounts::defaults(p), cfg, 7, TestScheme::grid, 30);
  const auto fs = sample_features(FeatureDistribution::gaussian(4.0, 2), 50, derive_seed(7, kFeatureStream));
  EXPECT_TRUE((r.fit.model.features.weights.array() == fs.weights.array()).all());
  EXPECT_LT(r.error.mse, 1e-6);
  EXPECT_EQ(r.error.n_test, 900);
  EXPECT_GE(r.wall_time_seconds, 0.0);
}

TEST(KernelCheck, Errors) {
  EXPECT_THROW(kernel_check(FeatureDistribution::uniform(1.0, 2), {10}, 5, 1), UnsupportedError);
  EXPECT_THROW(kernel_check(FeatureDistribution::gaussian(1.0, 2), {10}, 0, 1), ParameterError);
  EXPECT_THROW(kernel_check(FeatureDistribution::gaussian(1.0, 2), {}, 5, 1), EmptySetError);
}

}  // namespace
}  // namespace rfpde
