#include "mediabar/audio_dsp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <tuple>

#include "mediabar/error.hpp"

namespace mediabar {

namespace {

using cplx = std::complex<double>;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Twiddle from an exactly reduced index keeps large-N accuracy.
cplx twiddle(std::size_t k, std::size_t n) {
  const double angle = -2.0 * std::numbers::pi * static_cast<double>(k % n) / static_cast<double>(n);
  return {std::cos(angle), std::sin(angle)};
}

void fft_radix2(std::vector<cplx>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t step = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        cplx w = twiddle(k * step, n);
        if (inverse) w = std::conj(w);
        const cplx u = a[start + k];
        const cplx v = a[start + k + half] * w;
        a[start + k] = u + v;
        a[start + k + half] = u - v;
      }
    }
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (cplx& x : a) x *= scale;
  }
}

// X[k] = conj(c_k) * sum_n (x[n] conj(c_n)) c_{k-n}, with c_m = e^{i pi m^2 / N}.
void fft_bluestein(std::vector<cplx>& a) {
  const std::size_t n = a.size();
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;

  std::vector<cplx> chirp(n);
  const std::size_t two_n = 2 * n;
  // k^2 mod 2N, updated incrementally, keeps the angle argument small.
  std::size_t k2 = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double angle = std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
    chirp[k] = {std::cos(angle), std::sin(angle)};
    k2 = (k2 + 2 * k + 1) % two_n;
  }
  std::vector<cplx> x(m), y(m);
  for (std::size_t k = 0; k < n; ++k) x[k] = a[k] * std::conj(chirp[k]);
  y[0] = chirp[0];
  for (std::size_t k = 1; k < n; ++k) y[k] = y[m - k] = chirp[k];
  fft_radix2(x, false);
  fft_radix2(y, false);
  for (std::size_t k = 0; k < m; ++k) x[k] *= y[k];
  fft_radix2(x, true);
  for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * std::conj(chirp[k]);
}

}  // namespace

void fft(std::vector<cplx>& data) {
  if (data.size() <= 1) return;
  if (is_pow2(data.size())) {
    fft_radix2(data, false);
  } else {
    fft_bluestein(data);
  }
}

std::vector<double> dft_power_spectrum(std::span<const double> frame) {
  if (frame.size() < 2) throw Error(ErrorKind::Precondition, "dft_power_spectrum: frame length must be >= 2");
  std::vector<cplx> buf(frame.begin(), frame.end());
  fft(buf);
  std::vector<double> power(frame.size() / 2 + 1);
  for (std::size_t k = 0; k < power.size(); ++k) power[k] = std::norm(buf[k]);
  return power;
}

std::vector<double> hann_window(std::size_t n) {
  if (n < 2) throw Error(ErrorKind::Precondition, "hann_window: N must be >= 2");
  std::vector<double> w(n);
  const double denom = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / denom);
  }
  return w;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

void MfccConfig::validate(int sample_rate) const {
  auto fail = [](const std::string& why) { throw Error(ErrorKind::Precondition, "MfccConfig: " + why); };
  if (frame_size < 2) fail("frame_size must be >= 2");
  if (hop < 1) fail("hop must be >= 1");
  if (n_mfcc <= 0 || n_mfcc > n_mels) fail("need 0 < n_mfcc <= n_mels");
  if (sample_rate <= 0) fail("sample_rate must be positive");
  const double hi = resolved_fmax(sample_rate);
  if (!(fmin >= 0.0 && fmin < hi)) fail("need 0 <= fmin < fmax");
  if (!(log_floor > 0.0)) fail("log_floor must be positive");
}

Filterbank mel_filterbank(const MfccConfig& config, int sample_rate, std::size_t n_fft_bins) {
  config.validate(sample_rate);
  if (n_fft_bins != static_cast<std::size_t>(config.frame_size / 2 + 1)) {
    throw Error(ErrorKind::Precondition, "mel_filterbank: n_fft_bins must be frame_size/2 + 1");
  }
  Filterbank fb;
  fb.n_filters = static_cast<std::size_t>(config.n_mels);
  fb.n_bins = n_fft_bins;
  fb.weights.assign(fb.n_filters * fb.n_bins, 0.0);

  const double mel_lo = hz_to_mel(config.fmin);
  const double mel_hi = hz_to_mel(config.resolved_fmax(sample_rate));
  const std::size_t n_edges = fb.n_filters + 2;
  fb.edges_hz.resize(n_edges);
  for (std::size_t i = 0; i < n_edges; ++i) {
    const double mel = mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) / static_cast<double>(n_edges - 1);
    fb.edges_hz[i] = mel_to_hz(mel);
  }

  const double bin_hz = static_cast<double>(sample_rate) / static_cast<double>(config.frame_size);
  for (std::size_t f = 0; f < fb.n_filters; ++f) {
    const double left = fb.edges_hz[f];
    const double center = fb.edges_hz[f + 1];
    const double right = fb.edges_hz[f + 2];
    bool any = false;
    for (std::size_t k = 0; k < fb.n_bins; ++k) {
      const double hz = static_cast<double>(k) * bin_hz;
      double w = 0.0;
      if (hz >= left && hz <= center && center > left) {
        w = (hz - left) / (center - left);
      } else if (hz > center && hz <= right && right > center) {
        w = (right - hz) / (right - center);
      }
      w = std::max(w, 0.0);
      fb.weights[f * fb.n_bins + k] = w;
      any = any || w > 0.0;
    }
    if (!any) {
      throw Error(ErrorKind::Degenerate, "mel_filterbank: filter " + std::to_string(f) +
                                             " covers no FFT bin (edges collapse onto the bin grid)");
    }
  }
  return fb;
}

namespace {

// Pure memo: same key always maps to the same matrix.
std::shared_ptr<const Filterbank> cached_filterbank(const MfccConfig& config, int sample_rate) {
  using Key = std::tuple<int, int, int, double, double>;
  static std::mutex mu;
  static std::map<Key, std::shared_ptr<const Filterbank>> cache;
  const Key key{sample_rate, config.frame_size, config.n_mels, config.fmin, config.resolved_fmax(sample_rate)};
  std::lock_guard lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto fb = std::make_shared<const Filterbank>(
      mel_filterbank(config, sample_rate, static_cast<std::size_t>(config.frame_size / 2 + 1)));
  cache.emplace(key, fb);
  return fb;
}

}  // namespace

std::vector<double> dct2_orthonormal(std::span<const double> input, std::size_t n_out) {
  const std::size_t m = input.size();
  std::vector<double> out(n_out, 0.0);
  const double s0 = std::sqrt(1.0 / static_cast<double>(m));
  const double sk = std::sqrt(2.0 / static_cast<double>(m));
  for (std::size_t k = 0; k < n_out; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      acc += input[j] * std::cos(std::numbers::pi * static_cast<double>(k * (2 * j + 1)) / (2.0 * static_cast<double>(m)));
    }
    out[k] = (k == 0 ? s0 : sk) * acc;
  }
  return out;
}

MfccMatrix mfcc(const AudioClip& clip, const MfccConfig& config, std::string video_id) {
  config.validate(clip.sample_rate);
  const auto frame_size = static_cast<std::size_t>(config.frame_size);
  const auto hop = static_cast<std::size_t>(config.hop);
  if (clip.samples.size() < frame_size) {
    throw Error(ErrorKind::Precondition, "mfcc: clip" + (video_id.empty() ? std::string() : " '" + video_id + "'") +
                                             " has " + std::to_string(clip.samples.size()) +
                                             " samples, shorter than one frame (" + std::to_string(frame_size) + ")");
  }
  const auto fb = cached_filterbank(config, clip.sample_rate);
  const std::vector<double> window = hann_window(frame_size);

  MfccMatrix out;
  out.video_id = std::move(video_id);
  out.config = config;
  out.rows = (clip.samples.size() - frame_size) / hop + 1;
  out.cols = static_cast<std::size_t>(config.n_mfcc);
  out.data.resize(out.rows * out.cols);

  std::vector<double> frame(frame_size);
  std::vector<double> log_energy(fb->n_filters);
  for (std::size_t t = 0; t < out.rows; ++t) {
    const double* src = clip.samples.data() + t * hop;
    for (std::size_t i = 0; i < frame_size; ++i) frame[i] = src[i] * window[i];
    const std::vector<double> power = dft_power_spectrum(frame);
    for (std::size_t f = 0; f < fb->n_filters; ++f) {
      double e = 0.0;
      for (std::size_t k = 0; k < fb->n_bins; ++k) e += fb->at(f, k) * power[k];
      log_energy[f] = std::log(std::max(e, config.log_floor));
    }
    const std::vector<double> c = dct2_orthonormal(log_energy, out.cols);
    std::copy(c.begin(), c.end(), out.data.begin() + static_cast<std::ptrdiff_t>(t * out.cols));
  }
  return out;
}

AudioFeature summarize_mfcc(const MfccMatrix& m) {
  if (m.rows == 0) throw Error(ErrorKind::Precondition, "summarize_mfcc: matrix has no frames");
  AudioFeature out;
  out.video_id = m.video_id;
  out.values.assign(2 * m.cols, 0.0);
  const double T = static_cast<double>(m.rows);
  for (std::size_t c = 0; c < m.cols; ++c) {
    double sum = 0.0;
    for (std::size_t t = 0; t < m.rows; ++t) sum += m.at(t, c);
    const double mean = sum / T;
    double sq = 0.0;
    for (std::size_t t = 0; t < m.rows; ++t) {
      const double d = m.at(t, c) - mean;
      sq += d * d;
    }
    out.values[c] = mean;
    out.values[m.cols + c] = std::sqrt(sq / T);
  }
  double norm = 0.0;
  for (double v : out.values) norm += v * v;
  norm = std::sqrt(norm);
  if (!(norm > 0.0)) {
    throw Error(ErrorKind::Degenerate, "summarize_mfcc: all-zero audio feature for video '" + m.video_id + "'");
  }
  for (double& v : out.values) v /= norm;
  return out;
}

std::vector<EnvelopeBin> waveform_envelope(const AudioClip& clip, std::size_t bins) {
  if (bins < 1) throw Error(ErrorKind::Precondition, "waveform_envelope: bins must be >= 1");
  const std::size_t n = clip.samples.size();
  std::vector<EnvelopeBin> out;
  if (n == 0) return out;
  const std::size_t chunk = (n + bins - 1) / bins;
  for (std::size_t start = 0; start < n; start += chunk) {
    const std::size_t end = std::min(n, start + chunk);
    const auto [lo, hi] = std::minmax_element(clip.samples.begin() + static_cast<std::ptrdiff_t>(start),
                                              clip.samples.begin() + static_cast<std::ptrdiff_t>(end));
    out.push_back({*lo, *hi});
  }
  return out;
}

int frames_for_duration(double seconds, int sample_rate, const MfccConfig& config) {
  return static_cast<int>(std::lround(seconds * sample_rate / config.hop));
}

}  // namespace mediabar
