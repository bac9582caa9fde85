#include "mediabar/feature_matrix.hpp"

#include <cmath>

#include "mediabar/error.hpp"

namespace mediabar {

const char* to_string(Modality m) noexcept {
  switch (m) {
    case Modality::Text: return "text";
    case Modality::Barcode: return "barcode";
    case Modality::Audio: return "audio";
  }
  return "unknown";
}

Modality modality_from_string(const std::string& name) {
  if (name == "text") return Modality::Text;
  if (name == "barcode") return Modality::Barcode;
  if (name == "audio") return Modality::Audio;
  throw Error(ErrorKind::Precondition, "unknown modality '" + name + "'");
}

void FeatureMatrix::append(std::string id, std::span<const double> values) {
  if (ids.empty() && data.empty()) dims = values.size();
  if (values.size() != dims) {
    throw Error(ErrorKind::Schema, "feature for '" + id + "' has dimension " + std::to_string(values.size()) +
                                       ", expected " + std::to_string(dims));
  }
  ids.push_back(std::move(id));
  data.insert(data.end(), values.begin(), values.end());
}

void FeatureMatrix::validate() const {
  if (ids.size() < 2) throw Error(ErrorKind::Precondition, "feature matrix needs at least 2 rows");
  if (dims < 1) throw Error(ErrorKind::Precondition, "feature matrix needs at least 1 column");
  if (data.size() != ids.size() * dims) throw Error(ErrorKind::Schema, "feature matrix size mismatch");
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (double v : row(i)) {
      if (!std::isfinite(v)) throw Error(ErrorKind::Precondition, "non-finite feature value for '" + ids[i] + "'");
    }
  }
}

std::vector<std::string> l2_normalize_rows(FeatureMatrix& m) {
  std::vector<std::string> zero;
  for (std::size_t i = 0; i < m.size(); ++i) {
    auto r = m.row(i);
    double n = 0.0;
    for (double v : r) n += v * v;
    if (n == 0.0) {
      zero.push_back(m.ids[i]);
      continue;
    }
    n = std::sqrt(n);
    for (double& v : r) v /= n;
  }
  return zero;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace mediabar
