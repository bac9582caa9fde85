#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mediabar/ingest.hpp"

namespace mediabar {

struct MfccConfig {
  int frame_size = 2048;
  int hop = 512;
  int n_mels = 40;
  int n_mfcc = 13;
  double fmin = 0.0;
  std::optional<double> fmax;  // unset: Nyquist of the clip
  double log_floor = 1e-10;

  double resolved_fmax(int sample_rate) const {
    return fmax ? *fmax : sample_rate / 2.0;
  }
  /// Throws Precondition when an invariant is violated.
  void validate(int sample_rate) const;
};

/// Row-major T x n_mfcc.
struct MfccMatrix {
  std::string video_id;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;
  MfccConfig config;

  double at(std::size_t t, std::size_t c) const { return data[t * cols + c]; }
  std::span<const double> row(std::size_t t) const { return {data.data() + t * cols, cols}; }
};

/// Mean then population stddev per coefficient, L2-normalized.
struct AudioFeature {
  std::string video_id;
  std::vector<double> values;
};

/// In-place complex DFT (forward, e^{-2 pi i kn/N}); any N >= 1.
/// Radix-2 for powers of two, Bluestein's chirp-z otherwise.
void fft(std::vector<std::complex<double>>& data);

/// |X[k]|^2 for k = 0..N/2.
std::vector<double> dft_power_spectrum(std::span<const double> frame);

/// Symmetric Hann: 0.5 - 0.5 cos(2 pi n / (N-1)).
std::vector<double> hann_window(std::size_t n);

/// HTK mel scale.
double hz_to_mel(double hz);
double mel_to_hz(double mel);

/// Row-major n_mels x n_fft_bins matrix of unit-peak triangles.
struct Filterbank {
  std::size_t n_filters = 0;
  std::size_t n_bins = 0;
  std::vector<double> weights;
  std::vector<double> edges_hz;  // n_filters + 2 entries

  double at(std::size_t filter, std::size_t bin) const { return weights[filter * n_bins + bin]; }
};

Filterbank mel_filterbank(const MfccConfig& config, int sample_rate, std::size_t n_fft_bins);

/// Orthonormal DCT-II of `input`, first `n_out` coefficients.
std::vector<double> dct2_orthonormal(std::span<const double> input, std::size_t n_out);

MfccMatrix mfcc(const AudioClip& clip, const MfccConfig& config, std::string video_id = {});

AudioFeature summarize_mfcc(const MfccMatrix& m);

struct EnvelopeBin {
  double min = 0.0;
  double max = 0.0;
};

std::vector<EnvelopeBin> waveform_envelope(const AudioClip& clip, std::size_t bins = 1000);

/// MFCC frames spanning `seconds` at the configured hop, rounded.
int frames_for_duration(double seconds, int sample_rate, const MfccConfig& config);

}  // namespace mediabar
