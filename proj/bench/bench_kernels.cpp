// Serial reference vs OpenMP for the two parallel kernels.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "copguide/board.hpp"
#include "copguide/cohort.hpp"

using namespace copguide;

namespace {

std::vector<board::LoadSample> random_loads(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> load(0.0, 40.0);
  std::vector<board::LoadSample> in(n);
  for (std::size_t i = 0; i < n; ++i) {
    in[i].ts = static_cast<TimestampMs>(i);
    for (auto& c : in[i].loads) c = load(rng);
  }
  return in;
}

template <auto Kernel>
void BM_CopBatch(benchmark::State& state) {
  const auto in = random_loads(static_cast<std::size_t>(state.range(0)));
  std::vector<CoPSample> out(in.size());
  const board::BoardGeometry geom;
  for (auto _ : state) {
    Kernel(in, geom, 10.0, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void BM_Cohort(benchmark::State& state) {
  sim::CohortSpec spec;
  spec.participants = static_cast<int>(state.range(0));
  spec.keep_paths = false;
  for (auto _ : state) {
    auto runs = Kernel(spec);
    benchmark::DoNotOptimize(runs.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 3);
}

}  // namespace

BENCHMARK(BM_CopBatch<board::compute_cop_batch_serial>)->Name("cop_batch/serial")->Arg(1 << 16);
BENCHMARK(BM_CopBatch<board::compute_cop_batch>)->Name("cop_batch/openmp")->Arg(1 << 16);
BENCHMARK(BM_Cohort<sim::simulate_cohort_serial>)
    ->Name("cohort/serial")
    ->Arg(6)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Cohort<sim::simulate_cohort>)
    ->Name("cohort/openmp")
    ->Arg(6)
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
