#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "bml/fft.hpp"
#include "bml/littlewood_paley.hpp"
#include "bml/measures.hpp"
#include "bml/scenarios.hpp"
#include "bml/solver.hpp"
#include "bml/spectral_ops.hpp"

using namespace bml;

namespace {

RealField noise(const Grid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  RealField f(g);
  for (auto& v : f.values()) v = d(rng);
  return f;
}

AtomicMeasure random_measure(std::size_t atoms, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> x(-1.0, 1.0), w(0.1, 1.0);
  AtomicMeasure mu;
  for (std::size_t i = 0; i < atoms; ++i) mu.add({x(rng), x(rng)}, w(rng));
  return mu;
}

void BM_ForwardInverse(benchmark::State& state) {
  const Grid g(static_cast<std::size_t>(state.range(0)), 8.0);
  const auto f = noise(g, 1);
  for (auto _ : state) benchmark::DoNotOptimize(inverse_transform(forward_transform(f)));
}
BENCHMARK(BM_ForwardInverse)->Arg(64)->Arg(256)->Arg(1024);

void BM_PaddedProduct(benchmark::State& state) {
  const Grid g(static_cast<std::size_t>(state.range(0)), 8.0);
  const auto a = forward_transform(noise(g, 1));
  const auto b = forward_transform(noise(g, 2));
  for (auto _ : state) benchmark::DoNotOptimize(product_padded(a, b));
}
BENCHMARK(BM_PaddedProduct)->Arg(64)->Arg(256);

void BM_Decompose(benchmark::State& state) {
  const Grid g(static_cast<std::size_t>(state.range(0)), 8.0);
  const DyadicPartition partition(g);
  const auto f = noise(g, 3);
  for (auto _ : state) benchmark::DoNotOptimize(decompose(f, partition));
}
BENCHMARK(BM_Decompose)->Arg(64)->Arg(256);

void BM_BesovNorm(benchmark::State& state) {
  const Grid g(256, 8.0);
  const DyadicPartition partition(g);
  const auto f = noise(g, 4);
  for (auto _ : state) benchmark::DoNotOptimize(besov_norm(f, {1.5, 8.0 / 7.0, kInf}, partition));
}
BENCHMARK(BM_BesovNorm);

void BM_BLDistance(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto mu = random_measure(n, 5);
  const auto nu = random_measure(n, 6);
  for (auto _ : state) benchmark::DoNotOptimize(bl_distance(mu, nu));
}
BENCHMARK(BM_BLDistance)->Arg(4)->Arg(16)->Arg(32);

void BM_Mollify(benchmark::State& state) {
  const Grid g(256, 8.0);
  const auto mu = random_measure(8, 7);
  for (auto _ : state) benchmark::DoNotOptimize(mollify(mu, 4, g));
}
BENCHMARK(BM_Mollify);

void BM_SolverStep(benchmark::State& state) {
  const Grid g(static_cast<std::size_t>(state.range(0)), 8.0);
  auto s = make_scenario("two_atom", g);
  StepConfig cfg;
  cfg.dt = 1e-4;
  for (auto _ : state) {
    auto copy = s;
    benchmark::DoNotOptimize(step(copy, cfg));
  }
}
BENCHMARK(BM_SolverStep)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
