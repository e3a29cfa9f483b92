#include <benchmark/benchmark.h>

#include "mjost/jost.hpp"
#include "mjost/multilinear.hpp"
#include "mjost/sweep.hpp"

using namespace mjost;

namespace {

const Decomposition& comb() {
  static const Decomposition d = build_decomposition(power_law_comb(1.0, 2.0, 200.0), 200.0);
  return d;
}

const Decomposition& oscillatory() {
  static const Decomposition d = build_decomposition(Oscillatory{-1.0, 2.0}, 200.0);
  return d;
}

void BM_KernelEval(benchmark::State& state) {
  const WkbKernel K(oscillatory(), 1.0);
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(K.kernel(x));
    x += 0.013;
    if (x > 200.0) x = 0.0;
  }
}
BENCHMARK(BM_KernelEval);

void BM_KernelIntegralComb(benchmark::State& state) {
  const WkbKernel K(comb(), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(K.integrate_kernel(0.0, 200.0));
}
BENCHMARK(BM_KernelIntegralComb);

void BM_JostDirectComb(benchmark::State& state) {
  const auto profile = QProfile::build(comb());
  for (auto _ : state) benchmark::DoNotOptimize(jost_direct(WkbKernel(profile, 1.0), 200.0));
}
BENCHMARK(BM_JostDirectComb)->Unit(benchmark::kMillisecond);

void BM_JostDirectOscillatory(benchmark::State& state) {
  const auto profile = QProfile::build(oscillatory());
  for (auto _ : state) benchmark::DoNotOptimize(jost_direct(WkbKernel(profile, 1.0), 200.0));
}
BENCHMARK(BM_JostDirectOscillatory)->Unit(benchmark::kMillisecond);

void BM_BsSeminorm(benchmark::State& state) {
  const auto ms = shared_structure(comb(), 0.0, 2.0, static_cast<int>(state.range(0)));
  const WkbKernel K(comb(), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(bs_seminorm(K, ms, 2.0));
}
BENCHMARK(BM_BsSeminorm)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_IteratedTails(benchmark::State& state) {
  const WkbKernel K(comb(), 1.0);
  const auto f = K.kernel_function();
  std::vector<double> grid;
  for (int i = 0; i <= 800; ++i) grid.push_back(0.25 * i);
  const auto pattern = series_pattern(8);
  for (auto _ : state) benchmark::DoNotOptimize(iterated_tails(f, pattern, grid, 200.0, 8));
}
BENCHMARK(BM_IteratedTails)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
