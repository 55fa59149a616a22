// OpenMP kernels against their serial references. Set OMP_NUM_THREADS to compare.

#include <benchmark/benchmark.h>

#include "sandpile/chipfiring.hpp"
#include "sandpile/montecarlo.hpp"

using namespace sandpile;

namespace {

Config poisson_config(const MultiGraph& g, double lambda, std::uint64_t seed) {
  RngStream rng(seed, 0);
  Config c(g.num_vertices());
  for (Vertex v = 0; v < g.num_vertices(); ++v) c[v] = static_cast<Height>(poisson_sample(lambda, rng));
  return c;
}

template <Config (*Step)(const MultiGraph&, const Config&)>
void BM_Step(benchmark::State& state) {
  const MultiGraph g = build_torus(static_cast<std::size_t>(state.range(0)));
  Config c = poisson_config(g, 2.2, 5);
  for (auto _ : state) {
    c = Step(g, c);
    benchmark::DoNotOptimize(c.raw().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.num_vertices()));
}

void BM_Threshold(benchmark::State& state, Exec exec) {
  const TorusTopology g(static_cast<std::size_t>(state.range(0)));
  const auto trials = static_cast<Count>(state.range(1));
  for (auto _ : state) {
    const ThresholdSummary s = threshold_estimate(g, trials, 9, exec);
    benchmark::DoNotOptimize(s.density.mean);
  }
  state.SetItemsProcessed(state.iterations() * state.range(1));
}

}  // namespace

BENCHMARK(BM_Step<parallel_step>)->Name("parallel_step/torus")->Arg(256)->Arg(1024);
BENCHMARK(BM_Step<parallel_step_serial>)->Name("parallel_step_serial/torus")->Arg(256)->Arg(1024);
BENCHMARK_CAPTURE(BM_Threshold, parallel, Exec::Parallel)->Args({32, 64})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Threshold, serial, Exec::Serial)->Args({32, 64})->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
