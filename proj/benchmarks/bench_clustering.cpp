#include <benchmark/benchmark.h>

#include "mediabar/clustering.hpp"
#include "mediabar/rng.hpp"

using namespace mediabar;

namespace {

FeatureMatrix random_points(std::size_t n, std::size_t dims) {
  SplitMix64 rng(3);
  FeatureMatrix m;
  m.dims = dims;
  std::vector<double> row(dims);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : row) v = rng.uniform();
    m.append("p" + std::to_string(i), row);
  }
  return m;
}

}  // namespace

static void BM_Kmeans(benchmark::State& state) {
  const auto m = random_points(static_cast<std::size_t>(state.range(0)), 8);
  for (auto _ : state) benchmark::DoNotOptimize(kmeans(m, 5, 7).wcss);
}
BENCHMARK(BM_Kmeans)->Arg(100)->Arg(1000);

static void BM_ChooseK(benchmark::State& state) {
  const auto m = random_points(static_cast<std::size_t>(state.range(0)), 8);
  for (auto _ : state) benchmark::DoNotOptimize(choose_k(m, 7).selection.chosen_k);
}
BENCHMARK(BM_ChooseK)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);
