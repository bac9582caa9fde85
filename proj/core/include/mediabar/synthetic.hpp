#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mediabar/barcode.hpp"
#include "mediabar/ingest.hpp"
#include "mediabar/rng.hpp"

// Deterministic synthetic media for fixtures, demos and benchmarks.
namespace mediabar::synthetic {

/// Normal deviate via Box-Muller on SplitMix64 draws.
double gaussian(SplitMix64& rng);

/// Frames whose pixels are `colors[i]` plus uniform noise in [-noise, noise].
std::vector<FrameImage> frames_from_colors(const std::vector<Color>& colors, int width, int height, double noise,
                                           SplitMix64& rng);

/// Colors drawn i.i.d. uniform in [0, 255] per channel.
std::vector<Color> random_colors(std::size_t n, SplitMix64& rng);

/// Per-frame colors around `base`: slow drift plus i.i.d. jitter, clamped.
std::vector<Color> drifting_colors(std::size_t n, Color base, double jitter, SplitMix64& rng);

/// Sequence of sine bursts (random frequency in [f_lo, f_hi], random
/// duration and amplitude) over light noise; values stay within [-1, 1].
std::vector<double> tone_bursts(double seconds, int sample_rate, double f_lo, double f_hi, SplitMix64& rng);

// Syllable-like harmonic segments with smooth envelopes. The fundamental of
// each segment is drawn from [f_lo, f_hi]; four harmonics decay as 1/h.
std::vector<double> voiced_segments(double seconds, int sample_rate, double f_lo, double f_hi, SplitMix64& rng);

std::vector<double> sine(double seconds, int sample_rate, double hz, double amplitude);

struct VideoSpec {
  std::string id;
  std::vector<FrameImage> frames;
  std::vector<double> audio;
  int sample_rate = 22050;
  std::string title;
  std::string description;
  std::string transcript;
  std::optional<std::vector<double>> embedding;
  bool ppm_dir = false;
};

/// Writes media, transcripts and manifest.json under `dir`; returns the manifest path.
std::filesystem::path write_corpus(const std::filesystem::path& dir, const std::string& corpus_id,
                                   const std::vector<VideoSpec>& videos);

/// Transcript of `n_words` drawn from `vocabulary` with filler stop-words.
std::string random_transcript(const std::vector<std::string>& vocabulary, std::size_t n_words, SplitMix64& rng);

struct BundledFixture {
  std::filesystem::path manifest;
  /// Ground truth used by acceptance checks.
  std::vector<std::string> ids;
  std::vector<int> color_family;  // 0..2
  std::vector<int> audio_family;  // 0..1
  std::vector<int> text_family;   // 0..1
  std::string clone_a, clone_b;   // pair sharing a planted clip in both modalities
};

/// 12 videos, 32x32 frames (<= 300), <= 5 s audio at 22050 Hz: three color
/// families, two audio families, two text families, one planted
/// multi-modal clone pair.
BundledFixture write_bundled_fixture(const std::filesystem::path& dir, std::uint64_t seed = 2024);

}  // namespace mediabar::synthetic
