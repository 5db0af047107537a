#include <benchmark/benchmark.h>

#include "rfpde/solvers.hpp"

namespace {

using namespace rfpde;

void BM_FeatureBlock(benchmark::State& state) {
  const Index n = state.range(0);
  const auto fs = sample_features(FeatureDistribution::gaussian(100.0, 2), n, 1);
  const auto pts = sample_collocation(builtin_nonlinear_elliptic(), 2);
  for (auto _ : state) {
    auto block = eval_feature_block(fs, pts.interior);
    benchmark::DoNotOptimize(block.cos.data());
  }
  state.SetItemsProcessed(state.iterations() * n * pts.interior.rows());
}
BENCHMARK(BM_FeatureBlock)->Arg(100)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Jacobian(benchmark::State& state) {
  const Index n = state.range(0);
  const auto p = builtin_nonlinear_elliptic();
  const auto fs = sample_features(FeatureDistribution::gaussian(100.0, 2), n, 1);
  const CollocationSystem sys(p, fs, sample_collocation(p, 2));
  const VectorXd c = VectorXd::Constant(n, 1e-3);
  for (auto _ : state) {
    MatrixXd j = sys.jacobian(0, c);
    benchmark::DoNotOptimize(j.data());
  }
}
BENCHMARK(BM_Jacobian)->Arg(100)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_GaussNewtonSolve(benchmark::State& state) {
  const Index n = state.range(0);
  const auto p = builtin_nonlinear_elliptic();
  const auto fs = sample_features(FeatureDistribution::gaussian(100.0, 2), n, 1);
  const auto pts = sample_collocation(p, 400, std::vector<Index>{84}, 2);
  for (auto _ : state) {
    auto r = solve_gauss_newton(p, fs, pts, SolverConfig{});
    benchmark::DoNotOptimize(r.model.coefficients.data());
  }
}
BENCHMARK(BM_GaussNewtonSolve)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_LinearLeastSquares(benchmark::State& state) {
  const auto p = builtin_advection_diffusion();
  const auto fs = sample_features(FeatureDistribution::gaussian(1.0, 2), state.range(0), 1);
  const auto pts = sample_collocation(p, 2);
  SolverConfig cfg;
  cfg.method = SolverMethod::linear_ls;
  for (auto _ : state) {
    auto r = solve_linear(p, fs, pts, cfg);
    benchmark::DoNotOptimize(r.model.coefficients.data());
  }
}
BENCHMARK(BM_LinearLeastSquares)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
