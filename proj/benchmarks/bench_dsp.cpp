#include <benchmark/benchmark.h>

#include <complex>

#include "mediabar/audio_dsp.hpp"
#include "mediabar/rng.hpp"
#include "mediabar/synthetic.hpp"

using namespace mediabar;

static void BM_Fft(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  SplitMix64 rng(1);
  std::vector<std::complex<double>> x(n);
  for (auto& v : x) v = rng.uniform();
  for (auto _ : state) {
    auto c = x;
    fft(c);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetComplexityN(static_cast<benchmark::IterationCount>(n));
}
BENCHMARK(BM_Fft)->Arg(256)->Arg(2048)->Arg(1000)->Arg(4096);

static void BM_Mfcc(benchmark::State& state) {
  SplitMix64 rng(2);
  const auto x = synthetic::voiced_segments(static_cast<double>(state.range(0)), 22050, 100, 250, rng);
  const AudioClip clip{x, 22050};
  for (auto _ : state) benchmark::DoNotOptimize(mfcc(clip, MfccConfig{}).data.data());
  state.SetItemsProcessed(state.iterations() * static_cast<long>(x.size()));
}
BENCHMARK(BM_Mfcc)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);
