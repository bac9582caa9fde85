#include "mediabar/barcode.hpp"

#include <algorithm>
#include <cmath>

#include "mediabar/error.hpp"

namespace mediabar {

Color frame_mean_rgb(const FrameImage& frame) {
  // Integer sums are exact for any realistic frame size.
  std::uint64_t r = 0, g = 0, b = 0;
  for (const Rgb8& p : frame.pixels) {
    r += p.r;
    g += p.g;
    b += p.b;
  }
  const double n = static_cast<double>(frame.pixels.size());
  return {static_cast<double>(r) / n, static_cast<double>(g) / n, static_cast<double>(b) / n};
}

Barcode build_barcode(std::span<const FrameImage> frames, std::string video_id) {
  if (frames.empty()) {
    throw Error(ErrorKind::Precondition, "barcode for '" + video_id + "': no frames");
  }
  Barcode bc;
  bc.video_id = std::move(video_id);
  bc.colors.reserve(frames.size());
  for (const FrameImage& f : frames) bc.colors.push_back(frame_mean_rgb(f));
  return bc;
}

std::uint8_t round_channel(double value) {
  const double rounded = std::floor(value + 0.5);
  return static_cast<std::uint8_t>(std::clamp(rounded, 0.0, 255.0));
}

FrameImage render_barcode(const Barcode& barcode, int height_px) {
  if (height_px < 1) throw Error(ErrorKind::Precondition, "barcode height must be >= 1");
  const int width = static_cast<int>(barcode.colors.size());
  FrameImage img(width, height_px);
  for (int x = 0; x < width; ++x) {
    const Color& c = barcode.colors[static_cast<std::size_t>(x)];
    const Rgb8 px{round_channel(c.r), round_channel(c.g), round_channel(c.b)};
    for (int y = 0; y < height_px; ++y) img.at(x, y) = px;
  }
  return img;
}

Barcode barcode_from_image(const FrameImage& image, std::string video_id) {
  Barcode bc;
  bc.video_id = std::move(video_id);
  bc.colors.reserve(static_cast<std::size_t>(image.width));
  for (int x = 0; x < image.width; ++x) {
    const Rgb8& p = image.at(x, 0);
    bc.colors.push_back({static_cast<double>(p.r), static_cast<double>(p.g), static_cast<double>(p.b)});
  }
  return bc;
}

BarcodeFeature barcode_feature(const Barcode& barcode, int length) {
  if (length < 2) throw Error(ErrorKind::Precondition, "barcode feature length must be >= 2");
  if (barcode.colors.empty()) {
    throw Error(ErrorKind::Precondition, "barcode for '" + barcode.video_id + "' is empty");
  }
  const std::size_t n = barcode.colors.size();
  const auto L = static_cast<std::size_t>(length);
  BarcodeFeature out;
  out.video_id = barcode.video_id;
  out.values.resize(3 * L);
  for (std::size_t i = 0; i < L; ++i) {
    Color c;
    if (n == 1) {
      c = barcode.colors[0];
    } else {
      const double t = static_cast<double>(i) * static_cast<double>(n - 1) / static_cast<double>(L - 1);
      const auto lo = std::min(static_cast<std::size_t>(std::floor(t)), n - 1);
      const std::size_t hi = std::min(lo + 1, n - 1);
      const double frac = t - static_cast<double>(lo);
      const Color& a = barcode.colors[lo];
      const Color& b = barcode.colors[hi];
      c = {a.r + frac * (b.r - a.r), a.g + frac * (b.g - a.g), a.b + frac * (b.b - a.b)};
    }
    out.values[3 * i] = c.r / 255.0;
    out.values[3 * i + 1] = c.g / 255.0;
    out.values[3 * i + 2] = c.b / 255.0;
  }
  return out;
}

Color cluster_avg_color(std::span<const Barcode* const> members) {
  if (members.empty()) throw Error(ErrorKind::Precondition, "cluster_avg_color: empty cluster");
  Color sum;
  for (const Barcode* bc : members) {
    if (bc->colors.empty()) {
      throw Error(ErrorKind::Precondition, "cluster_avg_color: barcode '" + bc->video_id + "' is empty");
    }
    Color mean;
    for (const Color& c : bc->colors) {
      mean.r += c.r;
      mean.g += c.g;
      mean.b += c.b;
    }
    const double n = static_cast<double>(bc->colors.size());
    sum.r += mean.r / n;
    sum.g += mean.g / n;
    sum.b += mean.b / n;
  }
  const double k = static_cast<double>(members.size());
  return {sum.r / k, sum.g / k, sum.b / k};
}

Color cluster_avg_color(std::span<const Barcode> members) {
  std::vector<const Barcode*> ptrs;
  ptrs.reserve(members.size());
  for (const Barcode& b : members) ptrs.push_back(&b);
  return cluster_avg_color(std::span<const Barcode* const>(ptrs));
}

}  // namespace mediabar
