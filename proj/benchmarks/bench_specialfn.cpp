#include <benchmark/benchmark.h>

#include <cmath>

#include "gpseries/specialfn.hpp"

using namespace gpseries;

static void BM_BesselSeries(benchmark::State& state) {
  double x = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bessel_j(-0.25, x));
    x = x < 9.0 ? x + 0.37 : 0.5;
  }
}
BENCHMARK(BM_BesselSeries);

static void BM_BesselMidrange(benchmark::State& state) {
  double x = 10.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bessel_j(-0.25, x));
    x = x < 29.0 ? x + 0.83 : 10.5;
  }
}
BENCHMARK(BM_BesselMidrange);

static void BM_BesselAsymptotic(benchmark::State& state) {
  double x = 31.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bessel_j(-0.25, x));
    x = x < 6000.0 ? x + 17.1 : 31.0;
  }
}
BENCHMARK(BM_BesselAsymptotic);

static void BM_BesselZeros(benchmark::State& state) {
  const auto count = std::size_t(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(bessel_positive_zeros(BesselOrder(-0.25), count));
  }
  state.SetItemsProcessed(int64_t(state.iterations()) * int64_t(count));
}
BENCHMARK(BM_BesselZeros)->Arg(64)->Arg(512);

static void BM_FourierCosineCoefficient(benchmark::State& state) {
  const auto j = std::size_t(state.range(0));
  const auto gamma = [](double t) { return std::exp(-std::pow(t, 0.5)); };
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-9;
  cfg.rel_tol = 1e-8;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fourier_cosine_coefficient(gamma, 1.0, j, cfg));
  }
}
BENCHMARK(BM_FourierCosineCoefficient)->Arg(8)->Arg(128)->Arg(2048);
