#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mediabar/audio_dsp.hpp"
#include "mediabar/barcode.hpp"
#include "mediabar/clustering.hpp"
#include "mediabar/repurpose.hpp"
#include "mediabar/topics.hpp"

namespace mediabar {

using Json = nlohmann::json;

/// Rounds to 9 significant digits so that JSON output is byte-stable.
double sig9(double value);
/// "%.9g".
std::string format_real(double value);

/// Sorted keys, two-space indent, trailing newline.
std::string dump_json(const Json& doc);

Json clustering_to_json(Modality modality, std::uint64_t seed, const KSelection& selection,
                        const ClusterModel& model, std::span<const std::string> ids);

struct ClusteringFile {
  Modality modality = Modality::Text;
  std::vector<std::string> ids;
  std::vector<int> assignments;
  int chosen_k = 0;
};
ClusteringFile clustering_from_json(const Json& doc);

Json topic_report_to_json(int cluster, const LdaConfig& config, std::span<const RankedTopic> topics);
Json topic_scan_to_json(int cluster, std::span<const KScanPoint> scan);

Json repurpose_to_json(const RepurposeReport& report);

/// "id,<prefix>0,...,<prefix>{D-1}" header, one row per video.
std::string features_to_csv(const FeatureMatrix& features, const std::string& column_prefix);
FeatureMatrix features_from_csv(const std::string& csv, Modality modality);

std::string envelope_to_csv(std::span<const EnvelopeBin> envelope);
std::string similarity_to_csv(std::span<const std::string> ids, std::span<const double> matrix);
std::string vocabulary_to_text(std::span<const std::string> vocabulary);

std::string sha256_hex(std::string_view bytes);

}  // namespace mediabar
