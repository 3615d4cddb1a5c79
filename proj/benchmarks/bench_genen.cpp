#include <benchmark/benchmark.h>

#include "genen/conditions.hpp"
#include "genen/linalg.hpp"
#include "genen/simulate.hpp"
#include "genen/solvers.hpp"

using namespace genen;

namespace {

Dataset paper_cell(int p, int n, int q) {
  return sample_dataset({p, q, 0.3, 0.5, 0.7}, {q, 10.0, {}}, n, 1.0, {1, 0});
}

void BM_eigen_sym(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const SymMatrix sigma = build_covariance({p, 5, 0.3, 0.5, 0.7});
  for (auto _ : state) {
    benchmark::DoNotOptimize(eigen_sym(sigma));
  }
}
BENCHMARK(BM_eigen_sym)->Arg(100)->Arg(200)->Arg(400);

void BM_fit_gen_elastic_net(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const Dataset ds = paper_cell(p, p, 5);
  const SymMatrix sigma = build_covariance({p, 5, 0.3, 0.5, 0.7});
  const double lambda =
      0.05 * (ds.X.transpose() * ds.y).lpNorm<Eigen::Infinity>();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        fit_gen_elastic_net(ds.X, ds.y, sigma, {lambda, 1.0}));
  }
}
BENCHMARK(BM_fit_gen_elastic_net)->Arg(100)->Arg(200)->Arg(400);

void BM_solve_path(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const Dataset ds = paper_cell(p, p, 5);
  const SymMatrix sigma = build_covariance({p, 5, 0.3, 0.5, 0.7});
  const double lmax =
      2.0 * (ds.X.transpose() * ds.y).lpNorm<Eigen::Infinity>();
  const std::vector<double> lambdas = log_grid(1e-3 * lmax, lmax, 30);
  const std::vector<double> etas{0.01, 0.1, 1.0, 10.0, 100.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        solve_path(ds.X, ds.y, sigma, lambdas, etas, Method::gen));
  }
}
BENCHMARK(BM_solve_path)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_gic_grid(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const Dataset ds = paper_cell(p, p, 5);
  const SymMatrix sigma = build_covariance({p, 5, 0.3, 0.5, 0.7});
  const PartitionedMoments pm = partition_moments(ds.X, sigma, 5, 0.0);
  const auto lambdas = log_grid(1e-2, 1e4, 20);
  const auto etas = log_grid(1e-2, 1e4, 20);
  const Eigen::VectorXd beta1 = ds.beta_star.head(5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gic_value(pm, beta1, lambdas, etas));
  }
}
BENCHMARK(BM_gic_grid)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_eta_profile(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const Dataset ds = paper_cell(p, p, 5);
  const SymMatrix sigma = build_covariance({p, 5, 0.3, 0.5, 0.7});
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        eta_profile(ds.X, sigma, ds.beta_star, 5, 1.0));
  }
}
BENCHMARK(BM_eta_profile)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
