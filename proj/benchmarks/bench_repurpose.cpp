#include <benchmark/benchmark.h>

#include "mediabar/repurpose.hpp"
#include "mediabar/rng.hpp"

using namespace mediabar;

namespace {

Sequence random_sequence(const std::string& id, std::size_t frames, std::size_t channels, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Sequence s{id, channels, std::vector<double>(frames * channels)};
  for (auto& v : s.data) v = rng.uniform() * 255;
  return s;
}

}  // namespace

// Cost grows with the product of the two lengths.
static void BM_FindMatchesBarcode(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_sequence("a", n, 3, 1);
  const auto b = random_sequence("b", n, 3, 2);
  const auto cfg = MatchConfig::barcode_defaults();
  for (auto _ : state) benchmark::DoNotOptimize(find_matches(a, b, cfg).size());
}
BENCHMARK(BM_FindMatchesBarcode)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

static void BM_FindMatchesAudio(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_sequence("a", n, 13, 3);
  const auto b = random_sequence("b", n, 13, 4);
  const auto cfg = MatchConfig::audio_defaults(86);
  for (auto _ : state) benchmark::DoNotOptimize(find_matches(a, b, cfg, Modality::Audio).size());
}
BENCHMARK(BM_FindMatchesAudio)->Arg(400)->Arg(1300)->Unit(benchmark::kMillisecond);
