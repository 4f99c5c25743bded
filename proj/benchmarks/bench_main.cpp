#include <benchmark/benchmark.h>

#include <random>

#include "l0prox/poisson_tracking.hpp"
#include "l0prox/prox_grad.hpp"
#include "l0prox/separable.hpp"

using namespace l0prox;

namespace {

GridFunction random_function(const GridPtr& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  GridFunction u(g);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = nd(rng);
  return u;
}

void BM_SelectSupportUniform(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto g = make_grid(Grid::interval(1.0, n));
  GridFunction v = random_function(g, 1);
  for (std::size_t i = 0; i < n; ++i) v[i] = -std::abs(v[i]);
  for (auto _ : state) benchmark::DoNotOptimize(select_support(v, 0.3));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SelectSupportUniform)->RangeMultiplier(4)->Range(64, 1 << 16)->Complexity();

// Mixed weights go through the exact knapsack; keep instances small.
void BM_SelectSupportMixed(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> w(0.5, 1.5);
  std::vector<double> weights(n);
  for (auto& x : weights) x = w(rng);
  const auto g = make_grid(Grid::weighted(weights));
  GridFunction v = random_function(g, 3);
  for (std::size_t i = 0; i < n; ++i) v[i] = -std::abs(v[i]);
  const double tau = 0.4 * g->total_measure();
  for (auto _ : state) benchmark::DoNotOptimize(select_support(v, tau));
}
BENCHMARK(BM_SelectSupportMixed)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

void BM_ProxStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto g = make_grid(Grid::interval(1.0, n));
  const GridFunction u = random_function(g, 4);
  const GridFunction grad = random_function(g, 5);
  for (auto _ : state) benchmark::DoNotOptimize(prox_step(u, grad, 2.0, 0.1, 0.25));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ProxStep)->RangeMultiplier(4)->Range(64, 1 << 16)->Complexity();

void BM_PoissonGradient1D(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto g = make_grid(Grid::interval(1.0, n));
  const PoissonTracking f(g, random_function(g, 6));
  const GridFunction u = random_function(g, 7);
  for (auto _ : state) benchmark::DoNotOptimize(f.gradient(u));
}
BENCHMARK(BM_PoissonGradient1D)->Arg(64)->Arg(256)->Arg(1024);

void BM_PoissonGradient2D(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto g = make_grid(Grid::rectangle(1.0, 1.0, n, n));
  const PoissonTracking f(g, random_function(g, 8));
  const GridFunction u = random_function(g, 9);
  for (auto _ : state) benchmark::DoNotOptimize(f.gradient(u));
}
BENCHMARK(BM_PoissonGradient2D)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
