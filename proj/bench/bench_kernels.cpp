// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "pspm/matcher.hpp"
#include "pspm/metrics.hpp"
#include "pspm/pif.hpp"
#include "pspm/raster.hpp"
#include "pspm/rng.hpp"

namespace {

using namespace pspm;

Raster random_raster(std::size_t n, std::size_t t, double rate, std::uint64_t seed) {
  SeededRng rng(seed);
  Raster r(n, t);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t s = 0; s < t; ++s)
      if (rng.uniform() < rate) r.set(i, s, true);
  return r;
}

void BM_PairingSerial(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const Raster a = random_raster(n, 3000, 0.02, 1), b = random_raster(n, 3000, 0.02, 2);
  for (auto _ : st) benchmark::DoNotOptimize(reference::unpaired_report(a, b));
}

void BM_PairingParallel(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const Raster a = random_raster(n, 3000, 0.02, 1), b = random_raster(n, 3000, 0.02, 2);
  for (auto _ : st) benchmark::DoNotOptimize(unpaired_report(a, b));
}

void BM_DistanceSerial(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const Raster a = random_raster(n, 3000, 0.02, 3), b = random_raster(n, 3000, 0.02, 4);
  for (auto _ : st) benchmark::DoNotOptimize(reference::pairwise_distance(a, b));
}

void BM_DistanceParallel(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const Raster a = random_raster(n, 3000, 0.02, 3), b = random_raster(n, 3000, 0.02, 4);
  for (auto _ : st) benchmark::DoNotOptimize(pairwise_distance(a, b));
}

void BM_PifSerial(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  SeededRng rng(5);
  const PifNetwork net = build_pif(rng, n);
  for (auto _ : st) benchmark::DoNotOptimize(reference::simulate_pif(net, SeededRng(6), 2000));
}

void BM_PifParallel(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  SeededRng rng(5);
  const PifNetwork net = build_pif(rng, n);
  for (auto _ : st) benchmark::DoNotOptimize(simulate_pif(net, SeededRng(6), 2000));
}

}  // namespace

BENCHMARK(BM_PairingSerial)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PairingParallel)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DistanceSerial)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DistanceParallel)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PifSerial)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PifParallel)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
