#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mediabar/barcode.hpp"
#include "mediabar/rng.hpp"
#include "mediabar/synthetic.hpp"

using namespace mediabar;

namespace {

FrameImage random_frame(int w, int h, SplitMix64& rng) {
  FrameImage img(w, h);
  for (auto& p : img.pixels) {
    p = {static_cast<std::uint8_t>(rng.index(256)), static_cast<std::uint8_t>(rng.index(256)),
         static_cast<std::uint8_t>(rng.index(256))};
  }
  return img;
}

}  // namespace

TEST_CASE("frame_mean_rgb examples") {
  CHECK(frame_mean_rgb(FrameImage(2, 2, {10, 20, 30})) == Color{10, 20, 30});
  FrameImage f(2, 2);
  f.pixels = {{0, 0, 0}, {255, 255, 255}, {255, 0, 0}, {0, 0, 255}};
  CHECK(frame_mean_rgb(f) == Color{127.5, 63.75, 127.5});
  CHECK(frame_mean_rgb(FrameImage(1, 1, {7, 8, 9})) == Color{7, 8, 9});
}

TEST_CASE("frame_mean_rgb is invariant to pixel permutation") {
  SplitMix64 rng(3);
  auto f = random_frame(9, 7, rng);
  const Color before = frame_mean_rgb(f);
  std::reverse(f.pixels.begin(), f.pixels.end());
  const Color after = frame_mean_rgb(f);
  CHECK(after.r == doctest::Approx(before.r).epsilon(1e-12));
  CHECK(after.g == doctest::Approx(before.g).epsilon(1e-12));
  CHECK(after.b == doctest::Approx(before.b).epsilon(1e-12));
}

TEST_CASE("build_barcode") {
  std::vector<FrameImage> rgb{FrameImage(3, 2, {255, 0, 0}), FrameImage(3, 2, {0, 255, 0}),
                              FrameImage(3, 2, {0, 0, 255})};
  const auto bc = build_barcode(rgb, "v");
  CHECK(bc.colors == std::vector<Color>{{255, 0, 0}, {0, 255, 0}, {0, 0, 255}});
  CHECK(build_barcode(std::span(rgb).first(1), "v").colors.size() == 1);

  SplitMix64 rng(5);
  std::vector<FrameImage> frames;
  for (int i = 0; i < 100; ++i) frames.push_back(random_frame(4, 3, rng));
  const auto b100 = build_barcode(frames, "r");
  REQUIRE(b100.colors.size() == 100);
  bool ok = true;
  for (int i = 0; i < 100; ++i) ok = ok && b100.colors[i] == frame_mean_rgb(frames[i]);
  CHECK(ok);

  // permuting frames permutes colors
  std::vector<FrameImage> rev(frames.rbegin(), frames.rend());
  const auto brev = build_barcode(rev, "r");
  for (int i = 0; i < 100; ++i) ok = ok && brev.colors[i] == b100.colors[99 - i];
  CHECK(ok);
}

TEST_CASE("render_barcode") {
  Barcode bc{"v", {{255, 0, 0}, {0, 255, 0}, {127.5, 0.49, 254.5}}};
  const auto img = render_barcode(bc);
  CHECK(img.width == 3);
  CHECK(img.height == 224);
  bool constant = true;
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 224; ++y) constant = constant && img.at(x, y) == img.at(x, 0);
  CHECK(constant);
  CHECK(img.at(2, 0) == Rgb8{128, 0, 255});
  const auto strip = render_barcode(bc, 1);
  CHECK(strip.height == 1);
  CHECK(strip.at(0, 0) == Rgb8{255, 0, 0});
  CHECK(round_channel(-3.0) == 0);
  CHECK(round_channel(300.0) == 255);
}

TEST_CASE("render then read back recovers colors within half a unit") {
  SplitMix64 rng(8);
  Barcode bc{"v", {}};
  for (int i = 0; i < 200; ++i) bc.colors.push_back({rng.uniform() * 255, rng.uniform() * 255, rng.uniform() * 255});
  const auto back = barcode_from_image(render_barcode(bc, 5), "v");
  REQUIRE(back.colors.size() == bc.colors.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < bc.colors.size(); ++i) {
    worst = std::max({worst, std::abs(back.colors[i].r - bc.colors[i].r), std::abs(back.colors[i].g - bc.colors[i].g),
                      std::abs(back.colors[i].b - bc.colors[i].b)});
  }
  CHECK(worst <= 0.5);
}

TEST_CASE("barcode_feature examples") {
  Barcode constant{"c", std::vector<Color>(37, Color{100, 200, 50})};
  const auto f = barcode_feature(constant, 16);
  REQUIRE(f.values.size() == 48);
  for (int i = 0; i < 16; ++i) {
    CHECK(f.values[3 * i] == doctest::Approx(100.0 / 255).epsilon(1e-12));
    CHECK(f.values[3 * i + 1] == doctest::Approx(200.0 / 255).epsilon(1e-12));
    CHECK(f.values[3 * i + 2] == doctest::Approx(50.0 / 255).epsilon(1e-12));
  }

  SplitMix64 rng(2);
  Barcode same{"s", {}};
  for (int i = 0; i < 10; ++i) same.colors.push_back({rng.uniform() * 255, rng.uniform() * 255, rng.uniform() * 255});
  const auto id = barcode_feature(same, 10);
  for (int i = 0; i < 10; ++i) {
    CHECK(id.values[3 * i] == doctest::Approx(same.colors[i].r / 255).epsilon(1e-12));
    CHECK(id.values[3 * i + 2] == doctest::Approx(same.colors[i].b / 255).epsilon(1e-12));
  }

  Barcode two{"t", {{0, 0, 0}, {255, 255, 255}}};
  const auto mid = barcode_feature(two, 3);
  CHECK(mid.values[3] == doctest::Approx(0.5));
  CHECK(mid.values[4] == doctest::Approx(0.5));
  CHECK(mid.values[5] == doctest::Approx(0.5));
}

TEST_CASE("barcode_feature: range, dimension, and frame duplication") {
  SplitMix64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + rng.index(300);
    Barcode bc{"r", {}};
    for (std::size_t i = 0; i < n; ++i) bc.colors.push_back({rng.uniform() * 255, rng.uniform() * 255, rng.uniform() * 255});
    const auto f = barcode_feature(bc, 64);
    CHECK(f.values.size() == 192);
    CHECK(std::all_of(f.values.begin(), f.values.end(), [](double v) { return v >= 0.0 && v <= 1.0; }));

    // Duplicating every frame stretches the timeline from n-1 to 2n-1 steps,
    // so exact equality does not hold in general. Each duplicated-timeline
    // sample must still lie between the original colors that bracket it.
    Barcode dup{"d", {}};
    for (const auto& c : bc.colors) {
      dup.colors.push_back(c);
      dup.colors.push_back(c);
    }
    const auto g = barcode_feature(dup, 64);
    bool bracketed = true;
    for (int i = 0; i < 64; ++i) {
      const double t = i * (2.0 * n - 1) / 63.0;
      const auto lo = static_cast<std::size_t>(std::floor(t)) / 2;
      const auto hi = std::min(n - 1, static_cast<std::size_t>(std::ceil(t)) / 2);
      const Color a = bc.colors[lo], b = bc.colors[hi];
      const double vals[3] = {g.values[3 * i], g.values[3 * i + 1], g.values[3 * i + 2]};
      const double as[3] = {a.r, a.g, a.b}, bs[3] = {b.r, b.g, b.b};
      for (int ch = 0; ch < 3; ++ch) {
        const double v = vals[ch] * 255;
        bracketed = bracketed && v >= std::min(as[ch], bs[ch]) - 1e-9 && v <= std::max(as[ch], bs[ch]) + 1e-9;
      }
    }
    CHECK(bracketed);
  }
}

TEST_CASE("cluster_avg_color") {
  std::vector<Barcode> one{{"a", std::vector<Color>(5, Color{10, 20, 30})}};
  const auto c1 = cluster_avg_color(std::span<const Barcode>(one));
  CHECK(c1.r == doctest::Approx(10));
  CHECK(c1.b == doctest::Approx(30));

  std::vector<Barcode> two{{"a", {{0, 0, 0}}}, {"b", std::vector<Color>(9, Color{100, 100, 100})}};
  const auto c2 = cluster_avg_color(std::span<const Barcode>(two));
  CHECK(c2.r == doctest::Approx(50));

  SplitMix64 rng(4);
  std::vector<Barcode> three;
  for (int v = 0; v < 3; ++v) {
    Barcode b{"x", synthetic::random_colors(5 + rng.index(20), rng)};
    three.push_back(b);
  }
  double want[3] = {0, 0, 0};
  for (const auto& b : three) {
    double s[3] = {0, 0, 0};
    for (const auto& c : b.colors) {
      s[0] += c.r;
      s[1] += c.g;
      s[2] += c.b;
    }
    for (int ch = 0; ch < 3; ++ch) want[ch] += s[ch] / b.colors.size() / 3.0;
  }
  std::vector<const Barcode*> ptrs{&three[0], &three[1], &three[2]};
  const auto got = cluster_avg_color(std::span<const Barcode* const>(ptrs));
  CHECK(got.r == doctest::Approx(want[0]).epsilon(1e-12));
  CHECK(got.g == doctest::Approx(want[1]).epsilon(1e-12));
  CHECK(got.b == doctest::Approx(want[2]).epsilon(1e-12));
}
