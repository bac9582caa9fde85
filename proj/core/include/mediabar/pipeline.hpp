#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mediabar/audio_dsp.hpp"
#include "mediabar/barcode.hpp"
#include "mediabar/clustering.hpp"
#include "mediabar/ingest.hpp"
#include "mediabar/repurpose.hpp"
#include "mediabar/serialize.hpp"
#include "mediabar/text_features.hpp"
#include "mediabar/topics.hpp"

namespace mediabar {

struct AudioMatchSettings {
  std::optional<int> window;  // unset: MFCC frames spanning 2 s
  int step_a = 8;
  double threshold = 0.95;
  int diagonal_slack = 2;
  std::optional<int> min_len;
};

struct PipelineConfig {
  std::filesystem::path manifest;
  std::filesystem::path out_dir;
  std::optional<std::uint64_t> seed;

  bool barcode = true;
  bool audio = true;
  bool text = true;
  bool topics = true;
  bool repurpose = true;

  int k_min = 2;
  int k_max = 10;
  int restarts = 8;

  int barcode_length = kDefaultFeatureLength;
  int frame_stride = 1;
  int barcode_height = kDefaultBarcodeHeight;
  int envelope_bins = 1000;
  int exemplars = 3;

  MfccConfig mfcc;
  LdaConfig lda;
  MatchConfig barcode_match = MatchConfig::barcode_defaults();
  AudioMatchSettings audio_match;

  std::optional<std::filesystem::path> stopwords;
  bool text_similarity_rows = false;  // cluster rows of the cosine matrix instead of vectors
  bool topics_scan_k = false;
  bool within_clusters = false;

  /// Throws ErrorKind::Usage.
  void validate(bool need_seed) const;
};

/// Overlays a JSON config document (keys mirror PipelineConfig) onto `base`.
PipelineConfig config_from_json(const Json& doc, PipelineConfig base = {});
Json config_to_json(const PipelineConfig& config);

struct ClusterProfile {
  Modality modality = Modality::Text;
  int cluster = 0;
  std::vector<std::string> members;
  std::vector<std::string> exemplars;
  std::optional<Color> avg_rgb;
  std::optional<std::vector<RankedTopic>> topics;
};

struct ClusterRun {
  FeatureMatrix features;
  KSelection selection;
  ClusterModel model;
  std::vector<ClusterProfile> profiles;
};

/// Stage orchestration over one output directory. Per-video failures are
/// collected and the video is excluded from the affected modality; stage
/// failures throw mediabar::Error.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config);

  void run_barcode();
  void run_audio();
  void run_text();
  const ClusterRun& run_cluster(Modality modality, bool with_topics = false);
  void run_topics();
  const RepurposeReport& run_repurpose();
  /// Every enabled stage in dependency order, then summary.json.
  void run_all();
  void write_summary();

  /// 0 iff no per-video errors and no failed stages.
  int exit_code() const;

  const PipelineConfig& config() const { return config_; }
  const std::vector<std::string>& errors() const { return errors_; }
  const std::map<std::string, std::map<std::string, std::string>>& excluded() const { return excluded_; }
  const std::map<std::string, std::string>& stage_status() const { return stages_; }
  const std::map<std::string, std::string>& artifacts() const { return artifacts_; }  // path -> sha256
  const std::vector<Barcode>& barcodes();
  const std::optional<ClusterRun>& cluster_run(Modality m) const;
  const std::map<int, std::vector<RankedTopic>>& topic_reports() const { return topic_reports_; }

 private:
  const Manifest& manifest();
  bool has_manifest() const { return !config_.manifest.empty(); }
  void emit(const std::string& rel_path, const std::string& bytes);
  void exclude(Modality m, const std::string& id, const std::string& reason);
  void record_stage(const std::string& stage, const std::string& status);
  FeatureMatrix features_for(Modality m);
  void fit_topics(const ClusterRun& text_run);
  std::vector<ClusterProfile> build_profiles(Modality m, const ClusterRun& run);
  void write_profiles(Modality m, const ClusterRun& run);
  std::uint64_t seed() const;

  PipelineConfig config_;
  std::optional<Manifest> manifest_;

  std::optional<std::vector<Barcode>> barcodes_;
  std::optional<FeatureMatrix> barcode_features_;
  std::optional<FeatureMatrix> audio_features_;
  std::vector<MfccMatrix> mfccs_;
  std::vector<int> mfcc_rates_;
  std::optional<TextFeatures> text_features_;
  std::vector<TokenizedDoc> docs_;

  std::map<Modality, std::optional<ClusterRun>> clusters_;
  std::map<int, std::vector<RankedTopic>> topic_reports_;
  std::optional<RepurposeReport> repurpose_;

  std::vector<std::string> errors_;
  std::map<std::string, std::map<std::string, std::string>> excluded_;
  std::map<std::string, std::string> stages_;
  std::map<std::string, std::string> artifacts_;
};

}  // namespace mediabar
