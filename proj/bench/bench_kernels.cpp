#include <benchmark/benchmark.h>
#include <omp.h>

#include <string>

#include "swing/config.hpp"
#include "swing/reference.hpp"

namespace swing {
namespace {

const RunConfig& config() {
  static const RunConfig cfg = load_config(std::string(SWING_SOURCE_DIR) + "/configs/paper.json");
  return cfg;
}

// Arg 0: paths, arg 1: OpenMP threads.
void BM_Simulate(benchmark::State& state) {
  omp_set_num_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate(config().model, static_cast<std::size_t>(state.range(0)), 1));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Simulate)->Args({2000, 1})->Args({2000, 4})->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_SimulateSerial(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_serial(config().model, static_cast<std::size_t>(state.range(0)), 1));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateSerial)->Arg(2000)->Unit(benchmark::kMillisecond);

struct Inputs {
  PathSet paths;
  IndexPaths index;
  explicit Inputs(std::size_t n) : paths(simulate(config().model, n, 1)), index(config().index, paths) {}
};

void BM_BackwardSolve(benchmark::State& state) {
  const Inputs in(static_cast<std::size_t>(state.range(0)));
  omp_set_num_threads(static_cast<int>(state.range(1)));
  const RunConfig& cfg = config();
  for (auto _ : state) {
    benchmark::DoNotOptimize(backward_solve(in.paths, in.index, cfg.contract, cfg.grid, cfg.regressor));
  }
}
BENCHMARK(BM_BackwardSolve)->Args({1000, 1})->Args({1000, 4})->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_BackwardSolveReference(benchmark::State& state) {
  const Inputs in(static_cast<std::size_t>(state.range(0)));
  const RunConfig& cfg = config();
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::backward_solve(in.paths, in.index, cfg.contract, cfg.grid, cfg.regressor));
  }
}
BENCHMARK(BM_BackwardSolveReference)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace swing

BENCHMARK_MAIN();
