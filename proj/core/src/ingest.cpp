#include "mediabar/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mediabar/error.hpp"

namespace mediabar {

namespace fs = std::filesystem;
using nlohmann::json;

FrameImage::FrameImage(int w, int h, Rgb8 fill)
    : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

namespace {

[[noreturn]] void schema_fail(const std::string& video, const std::string& field,
                              const std::string& why) {
  std::string msg = "manifest";
  if (!video.empty()) msg += " video '" + video + "'";
  msg += " field '" + field + "': " + why;
  throw Error(ErrorKind::Schema, msg);
}

const json& require(const json& obj, const char* key, const std::string& video,
                    const std::string& prefix = {}) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_fail(video, prefix + key, "missing");
  return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& video,
                           const std::string& prefix = {}) {
  const json& v = require(obj, key, video, prefix);
  if (!v.is_string()) schema_fail(video, prefix + key, "expected string");
  return v.get<std::string>();
}

std::string require_path(const json& obj, const char* key, const std::string& video,
                         const std::string& prefix = {}) {
  std::string s = require_string(obj, key, video, prefix);
  if (s.empty()) schema_fail(video, prefix + key, "empty path");
  return s;
}

long long require_int(const json& obj, const char* key, const std::string& video,
                      const std::string& prefix = {}) {
  const json& v = require(obj, key, video, prefix);
  if (!v.is_number_integer()) schema_fail(video, prefix + key, "expected integer");
  return v.get<long long>();
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  if (path.is_relative() && !base.empty()) return base / path;
  return path;
}

VideoEntry parse_entry(const json& v, const fs::path& base, std::size_t index) {
  if (!v.is_object()) {
    throw Error(ErrorKind::Schema, "manifest videos[" + std::to_string(index) + "] is not an object");
  }
  VideoEntry e;
  auto id_it = v.find("id");
  if (id_it == v.end() || !id_it->is_string() || id_it->get<std::string>().empty()) {
    throw Error(ErrorKind::Schema,
                "manifest videos[" + std::to_string(index) + "] field 'id': missing or empty");
  }
  e.id = id_it->get<std::string>();

  const json& frames = require(v, "frames", e.id);
  if (!frames.is_object()) schema_fail(e.id, "frames", "expected object");
  e.frames.path = resolve(base, require_path(frames, "path", e.id, "frames."));
  const std::string fmt = require_string(frames, "format", e.id, "frames.");
  if (fmt == "ppm_dir") {
    e.frames.format = FrameFormat::PpmDir;
  } else if (fmt == "rgb24_raw") {
    e.frames.format = FrameFormat::Rgb24Raw;
  } else {
    schema_fail(e.id, "frames.format", "unknown format '" + fmt + "'");
  }
  const long long w = require_int(frames, "width", e.id, "frames.");
  const long long h = require_int(frames, "height", e.id, "frames.");
  const long long n = require_int(frames, "frame_count", e.id, "frames.");
  if (w < 1 || w > 1 << 16) schema_fail(e.id, "frames.width", "must be positive");
  if (h < 1 || h > 1 << 16) schema_fail(e.id, "frames.height", "must be positive");
  if (n < 1 || n > 1 << 30) schema_fail(e.id, "frames.frame_count", "must be positive");
  e.frames.width = static_cast<int>(w);
  e.frames.height = static_cast<int>(h);
  e.frames.frame_count = static_cast<int>(n);
  const json& fps = require(frames, "fps", e.id, "frames.");
  if (!fps.is_number()) schema_fail(e.id, "frames.fps", "expected number");
  e.frames.fps = fps.get<double>();
  if (!(e.frames.fps > 0.0) || !std::isfinite(e.frames.fps)) {
    schema_fail(e.id, "frames.fps", "must be positive");
  }

  const json& audio = require(v, "audio", e.id);
  if (!audio.is_object()) schema_fail(e.id, "audio", "expected object");
  e.audio.path = resolve(base, require_path(audio, "path", e.id, "audio."));
  const std::string afmt = require_string(audio, "format", e.id, "audio.");
  if (afmt != "wav_pcm16") schema_fail(e.id, "audio.format", "unknown format '" + afmt + "'");

  e.title = require_string(v, "title", e.id);
  e.description = require_string(v, "description", e.id);
  e.transcript_path = resolve(base, require_path(v, "transcript_path", e.id));
  if (auto it = v.find("embedding_path"); it != v.end() && !it->is_null()) {
    if (!it->is_string() || it->get<std::string>().empty()) {
      schema_fail(e.id, "embedding_path", "expected non-empty string");
    }
    e.embedding_path = resolve(base, it->get<std::string>());
  }
  return e;
}

}  // namespace

Manifest parse_manifest(const std::string& json_text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse, std::string("manifest: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::Schema, "manifest: top level must be an object");

  Manifest m;
  m.corpus_id = require_string(doc, "corpus_id", {});
  const json& videos = require(doc, "videos", {});
  if (!videos.is_array()) schema_fail({}, "videos", "expected array");

  std::set<std::string> seen;
  for (std::size_t i = 0; i < videos.size(); ++i) {
    VideoEntry e = parse_entry(videos[i], base_dir, i);
    if (!seen.insert(e.id).second) schema_fail(e.id, "id", "duplicate id '" + e.id + "'");
    m.videos.push_back(std::move(e));
  }
  return m;
}

Manifest load_manifest(const fs::path& path) {
  return parse_manifest(read_text_file(path), path.parent_path());
}

// ---------------------------------------------------------------- PPM

namespace {

std::string read_token(const std::string& data, std::size_t& pos) {
  while (pos < data.size() && std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
  const std::size_t start = pos;
  while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
  return data.substr(start, pos - start);
}

int parse_header_int(const std::string& tok, const fs::path& path, const char* what) {
  if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; }) ||
      tok.size() > 9) {
    throw Error(ErrorKind::Format, path.string() + ": bad PPM " + what + " '" + tok + "'");
  }
  return std::stoi(tok);
}

}  // namespace

FrameImage read_ppm(const fs::path& path) {
  const std::string data = read_text_file(path);
  std::size_t pos = 0;
  if (read_token(data, pos) != "P6") throw Error(ErrorKind::Format, path.string() + ": not a P6 PPM");
  const int w = parse_header_int(read_token(data, pos), path, "width");
  const int h = parse_header_int(read_token(data, pos), path, "height");
  const int maxval = parse_header_int(read_token(data, pos), path, "maxval");
  if (maxval != 255) {
    throw Error(ErrorKind::Format, path.string() + ": PPM maxval " + std::to_string(maxval) + " != 255");
  }
  if (w < 1 || h < 1) throw Error(ErrorKind::Format, path.string() + ": PPM has zero size");
  if (pos >= data.size() || !std::isspace(static_cast<unsigned char>(data[pos]))) {
    throw Error(ErrorKind::Io, path.string() + ": PPM header not terminated");
  }
  ++pos;
  const std::size_t need = static_cast<std::size_t>(w) * h * 3;
  if (data.size() - pos < need) throw Error(ErrorKind::Io, path.string() + ": PPM payload short");
  FrameImage img(w, h);
  std::memcpy(img.pixels.data(), data.data() + pos, need);
  return img;
}

std::string encode_ppm(const FrameImage& image) {
  std::string out = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  const std::size_t header = out.size();
  out.resize(header + image.pixels.size() * 3);
  std::memcpy(out.data() + header, image.pixels.data(), image.pixels.size() * 3);
  return out;
}

void write_ppm(const fs::path& path, const FrameImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  const std::string bytes = encode_ppm(image);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

static_assert(sizeof(Rgb8) == 3, "Rgb8 must be packed for raw frame IO");

// ---------------------------------------------------------------- frames

void write_rgb24_raw(const fs::path& path, std::span<const FrameImage> frames) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  for (const FrameImage& f : frames) {
    out.write(reinterpret_cast<const char*>(f.pixels.data()),
              static_cast<std::streamsize>(f.pixels.size() * 3));
  }
}

std::vector<FrameImage> read_frames(const FrameSource& source) { return read_frames(source, 1); }

std::vector<FrameImage> read_frames(const FrameSource& source, int stride) {
  if (stride < 1) throw Error(ErrorKind::Precondition, "frame stride must be >= 1");
  std::vector<FrameImage> frames;
  const std::size_t n = static_cast<std::size_t>(source.frame_count);

  if (source.format == FrameFormat::Rgb24Raw) {
    std::ifstream in(source.path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + source.path.string());
    const std::size_t frame_bytes = static_cast<std::size_t>(source.width) * source.height * 3;
    std::error_code ec;
    const auto size = fs::file_size(source.path, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot stat " + source.path.string());
    if (size != frame_bytes * n) {
      throw Error(ErrorKind::Io, source.path.string() + ": expected " + std::to_string(frame_bytes * n) +
                                     " bytes, found " + std::to_string(size) +
                                     (size < frame_bytes * n ? " (short file)" : ""));
    }
    for (std::size_t i = 0; i < n; i += static_cast<std::size_t>(stride)) {
      FrameImage f(source.width, source.height);
      in.seekg(static_cast<std::streamoff>(i * frame_bytes));
      in.read(reinterpret_cast<char*>(f.pixels.data()), static_cast<std::streamsize>(frame_bytes));
      if (!in) throw Error(ErrorKind::Io, source.path.string() + ": short read");
      frames.push_back(std::move(f));
    }
    return frames;
  }

  std::vector<fs::path> files;
  std::error_code ec;
  fs::directory_iterator it(source.path, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot list " + source.path.string());
  for (const auto& entry : it) {
    if (entry.is_regular_file() && entry.path().extension() == ".ppm") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
  if (files.size() != n) {
    throw Error(ErrorKind::Io, source.path.string() + ": expected " + std::to_string(n) + " frames, found " +
                                   std::to_string(files.size()) + (files.size() < n ? " (short directory)" : ""));
  }
  for (std::size_t i = 0; i < n; i += static_cast<std::size_t>(stride)) {
    FrameImage f = read_ppm(files[i]);
    if (f.width != source.width || f.height != source.height) {
      throw Error(ErrorKind::Format, files[i].string() + ": PPM is " + std::to_string(f.width) + "x" +
                                         std::to_string(f.height) + ", manifest declares " +
                                         std::to_string(source.width) + "x" + std::to_string(source.height));
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

// ---------------------------------------------------------------- WAV

namespace {

std::uint32_t le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}
std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | p[1] << 8);
}
void put32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>(v >> 8));
}

}  // namespace

AudioClip read_wav(const fs::path& path) {
  const std::string raw = read_text_file(path);
  const auto* data = reinterpret_cast<const unsigned char*>(raw.data());
  const std::size_t size = raw.size();
  const std::string name = path.string();
  if (size < 12 || std::memcmp(data, "RIFF", 4) != 0 || std::memcmp(data + 8, "WAVE", 4) != 0) {
    throw Error(ErrorKind::Format, name + ": not a RIFF/WAVE file");
  }

  bool have_fmt = false;
  int channels = 0;
  int rate = 0;
  std::size_t pos = 12;
  while (pos + 8 <= size) {
    const unsigned char* chunk = data + pos;
    const std::uint32_t len = le32(chunk + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (len < 16 || body + 16 > size) throw Error(ErrorKind::Io, name + ": truncated fmt chunk");
      const std::uint16_t format = le16(data + body);
      channels = le16(data + body + 2);
      rate = static_cast<int>(le32(data + body + 4));
      const std::uint16_t bits = le16(data + body + 14);
      if (format != 1) throw Error(ErrorKind::Format, name + ": format code " + std::to_string(format) + " is not PCM");
      if (bits != 16) throw Error(ErrorKind::Format, name + ": " + std::to_string(bits) + "-bit samples, need 16");
      if (channels != 1 && channels != 2) {
        throw Error(ErrorKind::Format, name + ": " + std::to_string(channels) + " channels, need 1 or 2");
      }
      if (rate <= 0) throw Error(ErrorKind::Format, name + ": bad sample rate");
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) throw Error(ErrorKind::Format, name + ": data chunk before fmt chunk");
      if (body + len > size) throw Error(ErrorKind::Io, name + ": truncated data chunk");
      const std::size_t frame_bytes = 2 * static_cast<std::size_t>(channels);
      if (len % frame_bytes != 0) throw Error(ErrorKind::Io, name + ": data chunk ends mid-frame");
      const std::size_t frames = len / frame_bytes;
      if (frames == 0) throw Error(ErrorKind::Io, name + ": no samples");
      AudioClip clip;
      clip.sample_rate = rate;
      clip.samples.resize(frames);
      for (std::size_t i = 0; i < frames; ++i) {
        const unsigned char* p = data + body + i * frame_bytes;
        if (channels == 1) {
          clip.samples[i] = static_cast<std::int16_t>(le16(p)) / 32768.0;
        } else {
          const double left = static_cast<std::int16_t>(le16(p));
          const double right = static_cast<std::int16_t>(le16(p + 2));
          clip.samples[i] = ((left + right) / 2.0) / 32768.0;
        }
      }
      return clip;
    }
    pos = body + len + (len & 1u);
  }
  throw Error(ErrorKind::Io, name + (have_fmt ? ": missing data chunk" : ": missing fmt chunk"));
}

void write_wav(const fs::path& path, std::span<const double> samples, int sample_rate) {
  const std::uint32_t data_len = static_cast<std::uint32_t>(samples.size() * 2);
  std::string out = "RIFF";
  put32(out, 36 + data_len);
  out += "WAVEfmt ";
  put32(out, 16);
  put16(out, 1);
  put16(out, 1);
  put32(out, static_cast<std::uint32_t>(sample_rate));
  put32(out, static_cast<std::uint32_t>(sample_rate) * 2);
  put16(out, 2);
  put16(out, 16);
  out += "data";
  put32(out, data_len);
  for (double s : samples) {
    const double c = std::clamp(s, -1.0, 1.0);
    put16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(std::lround(c * 32767.0))));
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot write " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
}

// ---------------------------------------------------------------- text

std::vector<double> parse_embedding(const std::string& line) {
  std::vector<double> values;
  std::string trimmed = line;
  while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back()))) trimmed.pop_back();
  std::stringstream ss(trimmed);
  std::string field;
  while (std::getline(ss, field, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(field, &used);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Parse, "embedding: bad value '" + field + "'");
    }
    while (used < field.size() && std::isspace(static_cast<unsigned char>(field[used]))) ++used;
    if (used != field.size() || !std::isfinite(v)) {
      throw Error(ErrorKind::Parse, "embedding: bad value '" + field + "'");
    }
    values.push_back(v);
  }
  if (values.empty()) throw Error(ErrorKind::Parse, "embedding: empty vector");
  return values;
}

TextSidecars read_text_sidecars(const VideoEntry& entry) {
  TextSidecars out;
  out.transcript = read_text_file(entry.transcript_path);
  if (entry.embedding_path) {
    const std::string text = read_text_file(*entry.embedding_path);
    const std::string first_line = text.substr(0, text.find('\n'));
    try {
      out.embedding = parse_embedding(first_line);
    } catch (const Error& e) {
      throw Error(e.kind(), "video '" + entry.id + "' " + e.what());
    }
  }
  return out;
}

void check_embedding_lengths(std::span<const std::string> ids, std::span<const TextSidecars> sidecars) {
  std::optional<std::size_t> first;
  std::string first_id;
  for (std::size_t i = 0; i < sidecars.size(); ++i) {
    if (!sidecars[i].embedding) continue;
    const std::size_t len = sidecars[i].embedding->size();
    if (!first) {
      first = len;
      first_id = ids[i];
    } else if (len != *first) {
      throw Error(ErrorKind::Schema, "embedding length mismatch: video '" + first_id + "' has " +
                                         std::to_string(*first) + ", video '" + ids[i] + "' has " +
                                         std::to_string(len));
    }
  }
}

}  // namespace mediabar
