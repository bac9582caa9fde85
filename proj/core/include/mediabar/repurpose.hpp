#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mediabar/feature_matrix.hpp"

namespace mediabar {

/// Row-major sequence of fixed-width elements: barcode colors (width 3) or
/// MFCC frames (width n_mfcc).
struct Sequence {
  std::string id;
  std::size_t width = 0;
  std::vector<double> data;

  std::size_t length() const { return width == 0 ? 0 : data.size() / width; }
};

struct MatchConfig {
  int window = 64;
  int step_a = 8;
  double threshold = 0.98;
  int diagonal_slack = 2;
  std::optional<int> min_len;  // unset: window

  int resolved_min_len() const { return min_len ? *min_len : window; }
  void validate() const;

  static MatchConfig barcode_defaults() { return {}; }
  /// `window_frames` MFCC frames cover ~2 s at the clip's hop.
  static MatchConfig audio_defaults(int window_frames) {
    MatchConfig c;
    c.window = window_frames;
    c.threshold = 0.95;
    return c;
  }
};

struct MatchSegment {
  std::string a_id;
  std::string b_id;
  std::size_t a_start = 0;
  std::size_t a_end = 0;  // inclusive
  std::size_t b_start = 0;
  std::size_t b_end = 0;  // inclusive
  double mean_score = 0.0;
  Modality modality = Modality::Barcode;
};

/// Pearson correlation of two windows of `width`-element frames. Each of the
/// `width` interleaved channels is centered by its own mean before taking the
/// cosine, so width = 1 is plain Pearson. When either side is constant, 1 if
/// the raw windows agree within 1e-9 element-wise, else 0.
double window_similarity(std::span<const double> u, std::span<const double> v, std::size_t width = 1);

/// Windowed correlation along diagonals. Hits at or above the threshold are
/// chained when their diagonals agree within the slack and their spans touch
/// or overlap in both sequences.
std::vector<MatchSegment> find_matches(const Sequence& a, const Sequence& b, const MatchConfig& config,
                                       Modality modality = Modality::Barcode);

struct PairReport {
  std::string a;
  std::string b;
  bool multi_modal = false;
  std::vector<MatchSegment> segments;
};

struct RepurposeReport {
  std::vector<PairReport> pairs;
  std::vector<std::string> skipped;  // "a/b modality: reason"
};

struct ModalitySignatures {
  Modality modality = Modality::Barcode;
  std::vector<Sequence> sequences;
  MatchConfig config;
  /// Per-sequence config override (audio window depends on the clip's rate).
  std::vector<std::optional<MatchConfig>> per_sequence;
};

using PairFilter = std::function<bool(const std::string&, const std::string&, Modality)>;

/// All unordered pairs per modality; keeps pairs with at least one segment,
/// sorted by (a, b) with a < b.
RepurposeReport scan_corpus(std::span<const ModalitySignatures> modalities, const PairFilter& filter = {});

}  // namespace mediabar
