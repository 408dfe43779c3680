#include <benchmark/benchmark.h>

#include "gpseries/expansions.hpp"
#include "gpseries/montecarlo.hpp"

using namespace gpseries;

static void BM_NormalStream(benchmark::State& state) {
  NormalStream stream(1, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(stream.next());
  }
}
BENCHMARK(BM_NormalStream);

static void BM_SamplePaths(benchmark::State& state) {
  const auto n_terms = std::size_t(state.range(0));
  const auto family = build_bm_kl(1.0, n_terms);
  SamplerConfig cfg{1, 16, Grid(1.0, 257)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_paths(family, cfg, n_terms));
  }
  state.SetItemsProcessed(int64_t(state.iterations()) * 16 * 257 *
                          int64_t(n_terms));
}
BENCHMARK(BM_SamplePaths)->Arg(256)->Arg(1024);

static void BM_RemainderCurve(benchmark::State& state) {
  const auto family = build_bm_kl(1.0, 512);
  SamplerConfig cfg{1, 32, Grid(1.0, 257)};
  const std::vector<std::size_t> truncations = {16, 32, 64, 128};
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_remainder(family, cfg, truncations));
  }
}
BENCHMARK(BM_RemainderCurve);
