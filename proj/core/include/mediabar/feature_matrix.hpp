#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mediabar {

enum class Modality { Text, Barcode, Audio };

const char* to_string(Modality m) noexcept;
Modality modality_from_string(const std::string& name);

/// N x D row-major matrix of per-video vectors in one modality.
struct FeatureMatrix {
  std::vector<std::string> ids;
  std::size_t dims = 0;
  std::vector<double> data;
  Modality modality = Modality::Text;

  std::size_t size() const { return ids.size(); }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * dims, dims}; }
  std::span<double> row(std::size_t i) { return {data.data() + i * dims, dims}; }
  double at(std::size_t i, std::size_t d) const { return data[i * dims + d]; }

  void append(std::string id, std::span<const double> values);
  /// N >= 2, D >= 1, finite entries, consistent sizes.
  void validate() const;
};

/// Scales each row to unit Euclidean norm; returns ids of all-zero rows (left untouched).
std::vector<std::string> l2_normalize_rows(FeatureMatrix& m);

double squared_distance(std::span<const double> a, std::span<const double> b);

}  // namespace mediabar
