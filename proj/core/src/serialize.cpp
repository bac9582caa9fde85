#include "mediabar/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <openssl/evp.h>

#include "mediabar/error.hpp"

namespace mediabar {

std::string format_real(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

double sig9(double value) {
  if (!std::isfinite(value)) return value;
  return std::strtod(format_real(value).c_str(), nullptr);
}

std::string dump_json(const Json& doc) { return doc.dump(2) + "\n"; }

namespace {

Json real(double v) { return sig9(v); }

Json real_array(std::span<const double> values) {
  Json arr = Json::array();
  for (double v : values) arr.push_back(real(v));
  return arr;
}

}  // namespace

Json clustering_to_json(Modality modality, std::uint64_t seed, const KSelection& selection,
                        const ClusterModel& model, std::span<const std::string> ids) {
  Json doc;
  doc["modality"] = to_string(modality);
  doc["seed"] = seed;
  Json cands = Json::array();
  for (const KCandidate& c : selection.candidates) {
    cands.push_back({{"k", c.k}, {"wcss", real(c.wcss)}, {"silhouette", real(c.silhouette)}});
  }
  doc["candidates"] = cands;
  doc["chosen_k"] = selection.chosen_k;
  doc["elbow_k"] = selection.elbow_k ? Json(*selection.elbow_k) : Json(nullptr);
  doc["rule"] = selection.rule;
  Json assign = Json::object();
  for (std::size_t i = 0; i < ids.size(); ++i) assign[ids[i]] = model.assignments[i];
  doc["assignments"] = assign;
  Json centers = Json::array();
  for (int c = 0; c < model.k; ++c) centers.push_back(real_array(model.center(c)));
  doc["centers"] = centers;
  return doc;
}

ClusteringFile clustering_from_json(const Json& doc) {
  try {
    ClusteringFile f;
    f.modality = modality_from_string(doc.at("modality").get<std::string>());
    f.chosen_k = doc.at("chosen_k").get<int>();
    for (const auto& [id, cluster] : doc.at("assignments").items()) {
      f.ids.push_back(id);
      f.assignments.push_back(cluster.get<int>());
    }
    return f;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("clustering file: ") + e.what());
  }
}

Json topic_report_to_json(int cluster, const LdaConfig& config, std::span<const RankedTopic> topics) {
  Json doc;
  doc["cluster"] = cluster;
  doc["config"] = {{"n_topics", config.n_topics},
                   {"alpha", real(config.resolved_alpha())},
                   {"beta", real(config.beta)},
                   {"iterations", config.iterations},
                   {"seed", config.seed},
                   {"top_words", config.top_words},
                   {"report_topics", config.report_topics}};
  Json list = Json::array();
  for (std::size_t r = 0; r < topics.size(); ++r) {
    list.push_back({{"rank", r + 1},
                    {"topic", topics[r].topic},
                    {"coherence", real(topics[r].coherence)},
                    {"words", topics[r].words}});
  }
  doc["topics"] = list;
  return doc;
}

Json topic_scan_to_json(int cluster, std::span<const KScanPoint> scan) {
  Json doc;
  doc["cluster"] = cluster;
  Json list = Json::array();
  for (const KScanPoint& p : scan) list.push_back({{"n_topics", p.n_topics}, {"mean_coherence", real(p.mean_coherence)}});
  doc["scan"] = list;
  return doc;
}

Json repurpose_to_json(const RepurposeReport& report) {
  Json pairs = Json::array();
  for (const PairReport& p : report.pairs) {
    Json segs = Json::array();
    for (const MatchSegment& s : p.segments) {
      segs.push_back({{"modality", to_string(s.modality)},
                      {"a_start", s.a_start},
                      {"a_end", s.a_end},
                      {"b_start", s.b_start},
                      {"b_end", s.b_end},
                      {"mean_score", real(s.mean_score)}});
    }
    pairs.push_back({{"a", p.a}, {"b", p.b}, {"multi_modal", p.multi_modal}, {"segments", segs}});
  }
  Json doc;
  doc["pairs"] = pairs;
  doc["skipped"] = report.skipped;
  return doc;
}

std::string features_to_csv(const FeatureMatrix& features, const std::string& column_prefix) {
  std::string out = "video_id";
  for (std::size_t d = 0; d < features.dims; ++d) out += "," + column_prefix + std::to_string(d);
  out += "\n";
  for (std::size_t i = 0; i < features.size(); ++i) {
    out += features.ids[i];
    for (double v : features.row(i)) out += "," + format_real(v);
    out += "\n";
  }
  return out;
}

FeatureMatrix features_from_csv(const std::string& csv, Modality modality) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line.rfind("video_id", 0) != 0) {
    throw Error(ErrorKind::Parse, "features CSV: missing header");
  }
  FeatureMatrix m;
  m.modality = modality;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string id, cell;
    std::getline(row, id, ',');
    std::vector<double> values;
    while (std::getline(row, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || *end != '\0') {
        throw Error(ErrorKind::Parse, "features CSV line " + std::to_string(line_no) + ": bad value '" + cell + "'");
      }
      values.push_back(v);
    }
    m.append(id, values);
  }
  return m;
}

std::string envelope_to_csv(std::span<const EnvelopeBin> envelope) {
  std::string out = "bin,min,max\n";
  for (std::size_t i = 0; i < envelope.size(); ++i) {
    out += std::to_string(i) + "," + format_real(envelope[i].min) + "," + format_real(envelope[i].max) + "\n";
  }
  return out;
}

std::string similarity_to_csv(std::span<const std::string> ids, std::span<const double> matrix) {
  std::string out = "video_id";
  for (const auto& id : ids) out += "," + id;
  out += "\n";
  const std::size_t n = ids.size();
  for (std::size_t i = 0; i < n; ++i) {
    out += ids[i];
    for (std::size_t j = 0; j < n; ++j) out += "," + format_real(matrix[i * n + j]);
    out += "\n";
  }
  return out;
}

std::string vocabulary_to_text(std::span<const std::string> vocabulary) {
  std::string out;
  for (const auto& w : vocabulary) out += w + "\n";
  return out;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::Io, "sha256 failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

}  // namespace mediabar
