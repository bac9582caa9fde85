#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mediabar {

struct Rgb8 {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb8&, const Rgb8&) = default;
};

/// Row-major RGB image; pixels.size() == width * height.
struct FrameImage {
  int width = 0;
  int height = 0;
  std::vector<Rgb8> pixels;

  FrameImage() = default;
  FrameImage(int w, int h, Rgb8 fill = {});

  Rgb8& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  const Rgb8& at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

/// Mono samples in [-1, 1].
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = 0;
};

enum class FrameFormat { PpmDir, Rgb24Raw };

struct FrameSource {
  std::filesystem::path path;
  FrameFormat format = FrameFormat::Rgb24Raw;
  int width = 0;
  int height = 0;
  int frame_count = 0;
  double fps = 0.0;
};

struct AudioSource {
  std::filesystem::path path;  // format is always wav_pcm16
};

struct VideoEntry {
  std::string id;
  FrameSource frames;
  AudioSource audio;
  std::string title;
  std::string description;
  std::filesystem::path transcript_path;
  std::optional<std::filesystem::path> embedding_path;
};

struct Manifest {
  std::string corpus_id;
  std::vector<VideoEntry> videos;
};

/// Parses and validates a manifest. Relative media paths are resolved
/// against the manifest's directory.
Manifest load_manifest(const std::filesystem::path& path);

/// Same as load_manifest but from an in-memory JSON document; relative paths
/// resolve against `base_dir`.
Manifest parse_manifest(const std::string& json_text,
                        const std::filesystem::path& base_dir = {});

std::vector<FrameImage> read_frames(const FrameSource& source);

/// Reads every `stride`-th frame (0, stride, 2*stride, ...).
std::vector<FrameImage> read_frames(const FrameSource& source, int stride);

/// RIFF/WAVE PCM 16-bit, mono or stereo. Stereo is averaged before scaling
/// by 1/32768.
AudioClip read_wav(const std::filesystem::path& path);

/// Writes mono PCM16; samples are clamped to [-1, 1] then scaled by 32767 and
/// rounded. Used for fixtures and tests.
void write_wav(const std::filesystem::path& path, std::span<const double> samples,
               int sample_rate);

/// Binary P6 with maxval 255.
FrameImage read_ppm(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const FrameImage& image);
std::string encode_ppm(const FrameImage& image);

/// Frame-major, row-major RGB bytes.
void write_rgb24_raw(const std::filesystem::path& path, std::span<const FrameImage> frames);

struct TextSidecars {
  std::string transcript;
  std::optional<std::vector<double>> embedding;
};

TextSidecars read_text_sidecars(const VideoEntry& entry);

/// One line of comma-separated reals.
std::vector<double> parse_embedding(const std::string& line);

/// Throws naming both ids when embedding lengths disagree across the corpus.
void check_embedding_lengths(std::span<const std::string> ids,
                             std::span<const TextSidecars> sidecars);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace mediabar
