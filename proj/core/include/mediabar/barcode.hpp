#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "mediabar/ingest.hpp"

namespace mediabar {

/// Real-valued color, each channel in [0, 255].
struct Color {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  friend bool operator==(const Color&, const Color&) = default;
};

/// One mean color per frame, in temporal order.
struct Barcode {
  std::string video_id;
  std::vector<Color> colors;
};

/// Fixed-length, [0,1]-scaled resampling of a barcode: 3*L values, (r,g,b)
/// interleaved per resampled time point.
struct BarcodeFeature {
  std::string video_id;
  std::vector<double> values;
};

inline constexpr int kDefaultBarcodeHeight = 224;
inline constexpr int kDefaultFeatureLength = 256;

Color frame_mean_rgb(const FrameImage& frame);

Barcode build_barcode(std::span<const FrameImage> frames, std::string video_id);

/// Column j is colors[j] rounded half-up and clamped to [0, 255].
FrameImage render_barcode(const Barcode& barcode, int height_px = kDefaultBarcodeHeight);

/// Inverse of rendering up to rounding: reads row 0 back into colors.
Barcode barcode_from_image(const FrameImage& image, std::string video_id);

/// Linear-interpolation resampling at t_i = i*(n-1)/(L-1), divided by 255.
BarcodeFeature barcode_feature(const Barcode& barcode, int length = kDefaultFeatureLength);

/// Mean of the per-video mean colors; every video weighs the same.
Color cluster_avg_color(std::span<const Barcode* const> members);
Color cluster_avg_color(std::span<const Barcode> members);

std::uint8_t round_channel(double value);

}  // namespace mediabar
