#include "mediabar/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include <nlohmann/json.hpp>

#include "mediabar/error.hpp"

namespace mediabar::synthetic {

namespace fs = std::filesystem;

double gaussian(SplitMix64& rng) {
  double u1 = rng.uniform();
  while (u1 <= 0.0) u1 = rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<FrameImage> frames_from_colors(const std::vector<Color>& colors, int width, int height, double noise,
                                           SplitMix64& rng) {
  std::vector<FrameImage> frames;
  frames.reserve(colors.size());
  auto channel = [&](double base) {
    const double v = base + (noise > 0.0 ? (rng.uniform() * 2.0 - 1.0) * noise : 0.0);
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
  };
  for (const Color& c : colors) {
    FrameImage f(width, height);
    for (Rgb8& p : f.pixels) p = {channel(c.r), channel(c.g), channel(c.b)};
    frames.push_back(std::move(f));
  }
  return frames;
}

std::vector<Color> random_colors(std::size_t n, SplitMix64& rng) {
  std::vector<Color> out(n);
  for (Color& c : out) c = {rng.uniform() * 255.0, rng.uniform() * 255.0, rng.uniform() * 255.0};
  return out;
}

std::vector<Color> drifting_colors(std::size_t n, Color base, double jitter, SplitMix64& rng) {
  std::vector<Color> out(n);
  const double phase = rng.uniform() * 2.0 * std::numbers::pi;
  const double period = 60.0 + rng.uniform() * 120.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double drift = 12.0 * std::sin(phase + 2.0 * std::numbers::pi * static_cast<double>(i) / period);
    auto ch = [&](double b) { return std::clamp(b + drift + (rng.uniform() * 2.0 - 1.0) * jitter, 0.0, 255.0); };
    out[i] = {ch(base.r), ch(base.g), ch(base.b)};
  }
  return out;
}

std::vector<double> tone_bursts(double seconds, int sample_rate, double f_lo, double f_hi, SplitMix64& rng) {
  const auto n = static_cast<std::size_t>(seconds * sample_rate);
  std::vector<double> out(n, 0.0);
  std::size_t pos = 0;
  while (pos < n) {
    const auto len = static_cast<std::size_t>((0.08 + rng.uniform() * 0.17) * sample_rate);
    const double hz = f_lo + rng.uniform() * (f_hi - f_lo);
    const double amp = 0.2 + rng.uniform() * 0.5;
    const double phase = rng.uniform() * 2.0 * std::numbers::pi;
    for (std::size_t i = 0; i < len && pos + i < n; ++i) {
      out[pos + i] = amp * std::sin(phase + 2.0 * std::numbers::pi * hz * static_cast<double>(i) / sample_rate);
    }
    pos += len;
  }
  for (double& s : out) s = std::clamp(s + 0.01 * gaussian(rng), -1.0, 1.0);
  return out;
}

std::vector<double> voiced_segments(double seconds, int sample_rate, double f_lo, double f_hi, SplitMix64& rng) {
  const auto n = static_cast<std::size_t>(seconds * sample_rate);
  std::vector<double> out(n, 0.0);
  const double nyquist = 0.5 * sample_rate;
  std::size_t pos = 0;
  while (pos < n) {
    const auto len = static_cast<std::size_t>((0.15 + rng.uniform() * 0.3) * sample_rate);
    const double f0 = f_lo + rng.uniform() * (f_hi - f_lo);
    const double glide = 1.0 + (rng.uniform() - 0.5) * 0.2;
    const double amp = 0.15 + rng.uniform() * 0.3;
    for (std::size_t i = 0; i < len && pos + i < n; ++i) {
      const double t = static_cast<double>(i) / sample_rate;
      const double u = static_cast<double>(i) / static_cast<double>(len);
      const double env = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * u);
      // instantaneous frequency moves linearly from f0 to f0*glide
      const double phase = 2.0 * std::numbers::pi * f0 * (t + (glide - 1.0) * t * u / 2.0);
      double v = 0.0;
      for (int h = 1; h <= 4; ++h) {
        if (f0 * glide * h >= nyquist) break;
        v += std::sin(h * phase) / h;
      }
      out[pos + i] = amp * env * v;
    }
    pos += len;
  }
  for (double& s : out) s = std::clamp(s + 0.01 * gaussian(rng), -1.0, 1.0);
  return out;
}

std::vector<double> sine(double seconds, int sample_rate, double hz, double amplitude) {
  const auto n = static_cast<std::size_t>(seconds * sample_rate);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = amplitude * std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / sample_rate);
  }
  return out;
}

namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << text;
}

}  // namespace

fs::path write_corpus(const fs::path& dir, const std::string& corpus_id, const std::vector<VideoSpec>& videos) {
  fs::create_directories(dir);
  nlohmann::json manifest;
  manifest["corpus_id"] = corpus_id;
  manifest["videos"] = nlohmann::json::array();
  for (const VideoSpec& v : videos) {
    const fs::path vdir = dir / v.id;
    fs::create_directories(vdir);
    nlohmann::json entry;
    entry["id"] = v.id;
    const int w = v.frames.empty() ? 1 : v.frames.front().width;
    const int h = v.frames.empty() ? 1 : v.frames.front().height;
    if (v.ppm_dir) {
      fs::create_directories(vdir / "frames");
      for (std::size_t i = 0; i < v.frames.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "%05zu.ppm", i);
        write_ppm(vdir / "frames" / name, v.frames[i]);
      }
      entry["frames"] = {{"path", v.id + "/frames"}, {"format", "ppm_dir"}};
    } else {
      write_rgb24_raw(vdir / "frames.rgb", v.frames);
      entry["frames"] = {{"path", v.id + "/frames.rgb"}, {"format", "rgb24_raw"}};
    }
    entry["frames"]["width"] = w;
    entry["frames"]["height"] = h;
    entry["frames"]["frame_count"] = v.frames.size();
    entry["frames"]["fps"] = 30;
    write_wav(vdir / "audio.wav", v.audio, v.sample_rate);
    entry["audio"] = {{"path", v.id + "/audio.wav"}, {"format", "wav_pcm16"}};
    entry["title"] = v.title;
    entry["description"] = v.description;
    write_file(vdir / "transcript.txt", v.transcript);
    entry["transcript_path"] = v.id + "/transcript.txt";
    if (v.embedding) {
      std::string line;
      for (std::size_t i = 0; i < v.embedding->size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", (*v.embedding)[i]);
        line += (i ? "," : "") + std::string(buf);
      }
      write_file(vdir / "embedding.txt", line + "\n");
      entry["embedding_path"] = v.id + "/embedding.txt";
    }
    manifest["videos"].push_back(entry);
  }
  const fs::path path = dir / "manifest.json";
  write_file(path, manifest.dump(2) + "\n");
  return path;
}

std::string random_transcript(const std::vector<std::string>& vocabulary, std::size_t n_words, SplitMix64& rng) {
  static const std::vector<std::string> filler = {"the", "and", "of", "to", "in", "is", "that", "this", "uh", "ok"};
  std::string out;
  for (std::size_t i = 0; i < n_words; ++i) {
    const bool use_filler = rng.uniform() < 0.3;
    const std::string& w = use_filler ? filler[rng.index(filler.size())] : vocabulary[rng.index(vocabulary.size())];
    out += (i ? " " : "") + w;
    if (rng.uniform() < 0.08) out += ".";
  }
  return out;
}

BundledFixture write_bundled_fixture(const fs::path& dir, std::uint64_t seed) {
  static const std::vector<std::string> maritime = {
      "navy",   "island",    "reef",  "fleet",   "coast",  "guard",   "maritime", "patrol",  "vessel", "territorial",
      "waters", "sovereign", "shoal", "fishing", "harbor", "carrier", "strait",   "dispute", "naval",  "archipelago"};
  static const std::vector<std::string> economy = {
      "market",  "trade",   "tariff",   "export", "import",    "economy", "growth",  "inflation", "investor", "stock",
      "capital", "finance", "currency", "supply", "commodity", "bank",    "revenue", "deficit",   "budget",   "industry"};
  static const Color bases[3] = {{225, 220, 205}, {30, 40, 95}, {175, 45, 35}};
  constexpr int kSampleRate = 22050;

  SplitMix64 rng(seed);
  BundledFixture fx;
  std::vector<VideoSpec> videos;
  std::vector<std::vector<Color>> colors;
  for (int i = 0; i < 12; ++i) {
    char id[8];
    std::snprintf(id, sizeof id, "v%02d", i + 1);
    const int color_family = i / 4;
    const int audio_family = i % 2 == 0 ? 0 : 1;
    const int text_family = (i / 2) % 2;
    fx.ids.push_back(id);
    fx.color_family.push_back(color_family);
    fx.audio_family.push_back(audio_family);
    fx.text_family.push_back(text_family);

    VideoSpec v;
    v.id = id;
    const std::size_t n_frames = 240 + rng.index(61);
    colors.push_back(drifting_colors(n_frames, bases[color_family], 25.0, rng));
    const double seconds = 4.0 + rng.uniform();
    v.audio = audio_family == 0 ? voiced_segments(seconds, kSampleRate, 100.0, 250.0, rng)
                                : voiced_segments(seconds, kSampleRate, 1500.0, 3000.0, rng);
    const auto& vocab = text_family == 0 ? maritime : economy;
    v.title = vocab[rng.index(vocab.size())] + " " + vocab[rng.index(vocab.size())] + " report";
    v.description = random_transcript(vocab, 20, rng);
    v.transcript = random_transcript(vocab, 120, rng);
    v.ppm_dir = i == 11;
    videos.push_back(std::move(v));
  }

  // Planted clone: v03 reuses 100 frames and 3 s of audio from v01.
  fx.clone_a = "v01";
  fx.clone_b = "v03";
  std::copy_n(colors[0].begin() + 40, 100, colors[2].begin() + 120);
  const std::size_t src = static_cast<std::size_t>(0.6 * kSampleRate);
  const std::size_t dst = static_cast<std::size_t>(1.1 * kSampleRate) + 37;
  const std::size_t len = static_cast<std::size_t>(3.0 * kSampleRate);
  std::copy_n(videos[0].audio.begin() + static_cast<std::ptrdiff_t>(src), len,
              videos[2].audio.begin() + static_cast<std::ptrdiff_t>(dst));

  for (std::size_t i = 0; i < videos.size(); ++i) {
    videos[i].frames = frames_from_colors(colors[i], 32, 32, 10.0, rng);
  }
  // The clone shares exact pixels, not only frame colors.
  for (int f = 0; f < 100; ++f) videos[2].frames[static_cast<std::size_t>(120 + f)] = videos[0].frames[static_cast<std::size_t>(40 + f)];

  fx.manifest = write_corpus(dir, "bundled-synthetic-12", videos);
  return fx;
}

}  // namespace mediabar::synthetic
