// Serial reference vs blocked stepper vs OpenMP workers.
//   ./bench_kernels --benchmark_filter=Grid

#include <benchmark/benchmark.h>

#include "spinfront/analysis.hpp"
#include "spinfront/kernels.hpp"

using namespace spinfront;

namespace {

EndAmplitudeKernel kernel_for(int n) {
  return EndAmplitudeKernel::for_chain({Model::IsingRWA, n, 1.0, 10.0});
}

void GridReference(benchmark::State& state) {
  const auto kernel = kernel_for(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(end_amplitude_grid_reference(kernel, 0.02, 4096));
  state.SetItemsProcessed(state.iterations() * 4096);
}

void GridStepper(benchmark::State& state) {
  const auto kernel = kernel_for(static_cast<int>(state.range(0)));
  const auto policy = ExecPolicy::parallel(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(end_amplitude_grid(kernel, 0.02, 4096, policy));
  state.SetItemsProcessed(state.iterations() * 4096);
}

void StartupScanWorkers(benchmark::State& state) {
  const auto policy = ExecPolicy::parallel(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(scan_startup({Model::IsingRWA, 2, 1.0, 10.0}, Measure::MI, 1e-5,
                                          {2, 150}, ScanGrid{}, policy));
  }
}

}  // namespace

BENCHMARK(GridReference)->Arg(100)->Arg(500);
BENCHMARK(GridStepper)->Args({100, 1})->Args({500, 1})->Args({500, 2})->Args({500, 4});
BENCHMARK(StartupScanWorkers)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
