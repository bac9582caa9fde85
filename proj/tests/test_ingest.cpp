#include <doctest.h>

#include <fstream>

#include "mediabar/error.hpp"
#include "mediabar/ingest.hpp"
#include "mediabar/rng.hpp"
#include "oracles.hpp"

using namespace mediabar;
namespace fs = std::filesystem;

namespace {

void write_bytes(const fs::path& p, const std::string& bytes) {
  std::ofstream(p, std::ios::binary) << bytes;
}

// 16-bit PCM WAV with arbitrary channel count, written by hand.
std::string wav_bytes(const std::vector<std::int16_t>& interleaved, int channels, int rate = 8000,
                      int bits = 16, int format = 1) {
  auto u32 = [](std::uint32_t v) {
    return std::string{char(v & 0xff), char((v >> 8) & 0xff), char((v >> 16) & 0xff), char((v >> 24) & 0xff)};
  };
  auto u16 = [](std::uint16_t v) { return std::string{char(v & 0xff), char((v >> 8) & 0xff)}; };
  std::string data;
  for (auto s : interleaved) data += u16(static_cast<std::uint16_t>(s));
  std::string fmt = u16(static_cast<std::uint16_t>(format)) + u16(static_cast<std::uint16_t>(channels)) + u32(rate) +
                    u32(rate * channels * bits / 8) + u16(static_cast<std::uint16_t>(channels * bits / 8)) +
                    u16(static_cast<std::uint16_t>(bits));
  std::string body = "WAVE" + std::string("fmt ") + u32(16) + fmt + "LIST" + u32(4) + "INFO" + "data" +
                     u32(static_cast<std::uint32_t>(data.size())) + data;
  return "RIFF" + u32(static_cast<std::uint32_t>(body.size())) + body;
}

std::string manifest_json(const std::string& videos) {
  return R"({"corpus_id": "c", "videos": [)" + videos + "]}";
}

std::string video_json(const std::string& id, int frame_count = 2, const std::string& extra = "") {
  return R"({"id": ")" + id + R"(", "frames": {"path": ")" + id +
         R"(.rgb", "format": "rgb24_raw", "width": 1, "height": 1, "frame_count": )" + std::to_string(frame_count) +
         R"(, "fps": 25}, "audio": {"path": ")" + id +
         R"(.wav", "format": "wav_pcm16"}, "title": "t", "description": "d", "transcript_path": ")" + id + R"(.txt")" +
         extra + "}";
}

}  // namespace

TEST_CASE("manifest: single entry parses with paths resolved against the base dir") {
  const auto m = parse_manifest(manifest_json(video_json("v1", 2, R"(, "embedding_path": "e.txt")")), "/data");
  REQUIRE(m.videos.size() == 1);
  CHECK(m.corpus_id == "c");
  const auto& v = m.videos[0];
  CHECK(v.id == "v1");
  CHECK(v.frames.path == fs::path("/data/v1.rgb"));
  CHECK(v.frames.format == FrameFormat::Rgb24Raw);
  CHECK(v.frames.frame_count == 2);
  CHECK(v.audio.path == fs::path("/data/v1.wav"));
  CHECK(v.transcript_path == fs::path("/data/v1.txt"));
  REQUIRE(v.embedding_path);
  CHECK(*v.embedding_path == fs::path("/data/e.txt"));
}

TEST_CASE("manifest: duplicate id is a schema error naming the id") {
  try {
    parse_manifest(manifest_json(video_json("v1") + "," + video_json("v1")));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Schema);
    CHECK(std::string(e.what()).find("v1") != std::string::npos);
  }
}

TEST_CASE("manifest: invariant violations") {
  auto kind_of = [](const std::string& text) {
    try {
      parse_manifest(text);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Usage;  // sentinel: no error
  };
  CHECK(kind_of(manifest_json(video_json("v1", 0))) == ErrorKind::Schema);
  CHECK(kind_of(manifest_json(video_json(""))) == ErrorKind::Schema);
  CHECK(kind_of("{not json") == ErrorKind::Parse);
  CHECK(kind_of(R"({"corpus_id": "c"})") == ErrorKind::Schema);
  std::string bad_fps = video_json("v1");
  bad_fps.replace(bad_fps.find("\"fps\": 25"), 9, "\"fps\": 0");
  CHECK(kind_of(manifest_json(bad_fps)) == ErrorKind::Schema);
  std::string bad_format = video_json("v1");
  bad_format.replace(bad_format.find("rgb24_raw"), 9, "mp4");
  CHECK(kind_of(manifest_json(bad_format)) == ErrorKind::Schema);
}

TEST_CASE("rgb24_raw: byte layout and short file") {
  const auto dir = oracle::scratch_dir("raw");
  write_bytes(dir / "f.rgb", std::string("\xff\x00\x00\x00\xff\x00", 6));
  FrameSource src{dir / "f.rgb", FrameFormat::Rgb24Raw, 1, 1, 2, 25.0};
  const auto frames = read_frames(src);
  REQUIRE(frames.size() == 2);
  CHECK(frames[0].at(0, 0) == Rgb8{255, 0, 0});
  CHECK(frames[1].at(0, 0) == Rgb8{0, 255, 0});

  write_bytes(dir / "short.rgb", std::string(9, '\0'));
  FrameSource shorter{dir / "short.rgb", FrameFormat::Rgb24Raw, 2, 1, 2, 25.0};
  try {
    read_frames(shorter);
    FAIL("expected short-file error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
  }
  fs::remove_all(dir);
}

TEST_CASE("rgb24_raw: round trip and frame count over random sizes") {
  const auto dir = oracle::scratch_dir("rawrt");
  SplitMix64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int w = 1 + static_cast<int>(rng.index(7));
    const int h = 1 + static_cast<int>(rng.index(5));
    const int n = 1 + static_cast<int>(rng.index(9));
    std::vector<FrameImage> frames;
    for (int f = 0; f < n; ++f) {
      FrameImage img(w, h);
      for (auto& p : img.pixels) {
        p = {static_cast<std::uint8_t>(rng.index(256)), static_cast<std::uint8_t>(rng.index(256)),
             static_cast<std::uint8_t>(rng.index(256))};
      }
      frames.push_back(img);
    }
    write_rgb24_raw(dir / "x.rgb", frames);
    const auto back = read_frames(FrameSource{dir / "x.rgb", FrameFormat::Rgb24Raw, w, h, n, 30.0});
    REQUIRE(back.size() == static_cast<std::size_t>(n));
    for (int f = 0; f < n; ++f) CHECK(back[f].pixels == frames[f].pixels);
    const auto strided = read_frames(FrameSource{dir / "x.rgb", FrameFormat::Rgb24Raw, w, h, n, 30.0}, 2);
    CHECK(strided.size() == static_cast<std::size_t>((n + 1) / 2));
  }
  fs::remove_all(dir);
}

TEST_CASE("ppm_dir: lexicographic order and count mismatch") {
  const auto dir = oracle::scratch_dir("ppm");
  fs::create_directories(dir / "frames");
  write_ppm(dir / "frames" / "001.ppm", FrameImage(2, 1, {0, 0, 9}));
  write_ppm(dir / "frames" / "000.ppm", FrameImage(2, 1, {7, 0, 0}));
  write_bytes(dir / "frames" / "notes.txt", "ignored");
  const auto frames = read_frames(FrameSource{dir / "frames", FrameFormat::PpmDir, 2, 1, 2, 25.0});
  REQUIRE(frames.size() == 2);
  CHECK(frames[0].at(1, 0) == Rgb8{7, 0, 0});
  CHECK(frames[1].at(1, 0) == Rgb8{0, 0, 9});
  CHECK_THROWS_AS(read_frames(FrameSource{dir / "frames", FrameFormat::PpmDir, 2, 1, 3, 25.0}), Error);
  CHECK_THROWS_AS(read_frames(FrameSource{dir / "frames", FrameFormat::PpmDir, 3, 1, 2, 25.0}), Error);
  write_bytes(dir / "bad.ppm", "P3\n1 1\n255\n0 0 0\n");
  CHECK_THROWS_AS(read_ppm(dir / "bad.ppm"), Error);
  fs::remove_all(dir);
}

TEST_CASE("wav: scaling examples") {
  const auto dir = oracle::scratch_dir("wav");
  write_bytes(dir / "m.wav", wav_bytes({32767, -32768, 0}, 1));
  const auto mono = read_wav(dir / "m.wav");
  CHECK(mono.sample_rate == 8000);
  REQUIRE(mono.samples.size() == 3);
  CHECK(mono.samples[0] == 0.999969482421875);
  CHECK(mono.samples[1] == -1.0);
  CHECK(mono.samples[2] == 0.0);

  write_bytes(dir / "s.wav", wav_bytes({1000, 3000}, 2));
  const auto stereo = read_wav(dir / "s.wav");
  REQUIRE(stereo.samples.size() == 1);
  CHECK(stereo.samples[0] == 0.06103515625);

  write_bytes(dir / "f.wav", wav_bytes({1, 2}, 1, 8000, 16, 3));
  CHECK_THROWS_AS(read_wav(dir / "f.wav"), Error);
  auto truncated = wav_bytes({1, 2, 3, 4}, 1);
  truncated.resize(truncated.size() - 3);
  write_bytes(dir / "t.wav", truncated);
  CHECK_THROWS_AS(read_wav(dir / "t.wav"), Error);
  fs::remove_all(dir);
}

TEST_CASE("wav: decoding is odd-symmetric on [-32767, 32767]") {
  const auto dir = oracle::scratch_dir("wavsym");
  std::vector<std::int16_t> s;
  for (int v = -32767; v <= 32767; ++v) s.push_back(static_cast<std::int16_t>(v));
  write_bytes(dir / "all.wav", wav_bytes(s, 1));
  const auto clip = read_wav(dir / "all.wav");
  REQUIRE(clip.samples.size() == s.size());
  const std::size_t mid = 32767;
  bool ok = true;
  for (std::size_t i = 0; i <= mid; ++i) ok = ok && clip.samples[mid + i] == -clip.samples[mid - i];
  CHECK(ok);
  fs::remove_all(dir);
}

TEST_CASE("text sidecars") {
  const auto dir = oracle::scratch_dir("side");
  write_bytes(dir / "t.txt", "hello world");
  write_bytes(dir / "e.txt", "0.5,-0.25\n");
  VideoEntry v;
  v.id = "v1";
  v.transcript_path = dir / "t.txt";
  v.embedding_path = dir / "e.txt";
  const auto s = read_text_sidecars(v);
  CHECK(s.transcript == "hello world");
  REQUIRE(s.embedding);
  CHECK(*s.embedding == std::vector<double>{0.5, -0.25});
  CHECK_THROWS_AS(parse_embedding("1,abc"), Error);

  std::vector<std::string> ids{"a", "b"};
  std::vector<TextSidecars> sc(2);
  sc[0].embedding = std::vector<double>(4, 0.0);
  sc[1].embedding = std::vector<double>(5, 0.0);
  try {
    check_embedding_lengths(ids, sc);
    FAIL("expected corpus-level error");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find('a') != std::string::npos);
    CHECK(msg.find('b') != std::string::npos);
  }
  fs::remove_all(dir);
}
