// mediabar: per-video color barcodes, MFCC signatures and text vectors,
// K-selected clustering per modality, topic reports and repurposed-segment
// detection.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "mediabar/error.hpp"
#include "mediabar/pipeline.hpp"

namespace {

using mediabar::Error;
using mediabar::ErrorKind;
using mediabar::Modality;
using mediabar::PipelineConfig;

constexpr int kExitOk = 0;
constexpr int kExitVideoFailures = 1;
constexpr int kExitUsage = 2;

struct Flags {
  std::string manifest;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string modality;
  bool with_topics = false;
  bool scan_k = false;
  bool within_clusters = false;
  bool similarity_rows = false;
  std::string stopwords;
  std::optional<int> k_min, k_max, stride, length;
};

PipelineConfig resolve_config(const Flags& f) {
  PipelineConfig c;
  if (!f.config.empty()) {
    const std::string text = mediabar::read_text_file(f.config);
    mediabar::Json doc;
    try {
      doc = mediabar::Json::parse(text);
    } catch (const mediabar::Json::parse_error& e) {
      throw Error(ErrorKind::Usage, "config " + f.config + ": " + e.what());
    }
    c = mediabar::config_from_json(doc);
  }
  if (!f.manifest.empty()) c.manifest = f.manifest;
  if (!f.out.empty()) c.out_dir = f.out;
  if (f.seed) c.seed = f.seed;
  if (!f.stopwords.empty()) c.stopwords = f.stopwords;
  if (f.k_min) c.k_min = *f.k_min;
  if (f.k_max) c.k_max = *f.k_max;
  if (f.stride) c.frame_stride = *f.stride;
  if (f.length) c.barcode_length = *f.length;
  if (f.scan_k) c.topics_scan_k = true;
  if (f.within_clusters) c.within_clusters = true;
  if (f.similarity_rows) c.text_similarity_rows = true;
  return c;
}

void report(const mediabar::Pipeline& p) {
  for (const std::string& e : p.errors()) std::cerr << "mediabar: " << e << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mediabar: multimodal video characterization"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  app.add_option("--manifest", f.manifest, "Corpus manifest (JSON)");
  app.add_option("--out", f.out, "Output directory");
  app.add_option("--seed", f.seed, "Seed for every randomized stage");
  app.add_option("--config", f.config, "JSON config mirroring the pipeline settings; flags override it");
  app.add_option("--stopwords", f.stopwords, "Stop-word file, one word per line");
  app.add_option("--k-min", f.k_min, "Smallest K tried");
  app.add_option("--k-max", f.k_max, "Largest K tried");

  auto* barcode = app.add_subcommand("barcode", "Barcode PPMs and fixed-length barcode features");
  barcode->add_option("--stride", f.stride, "Use every k-th frame");
  barcode->add_option("--length", f.length, "Resampled feature length L");
  app.add_subcommand("audio", "MFCC summary features and waveform envelopes");
  app.add_subcommand("text", "Text vectors, vocabulary and cosine similarity matrix");
  auto* cluster = app.add_subcommand("cluster", "K selection, clustering and cluster profiles");
  cluster->add_option("--modality", f.modality, "text | barcode | audio")
      ->required()
      ->check(CLI::IsMember({"text", "barcode", "audio"}));
  cluster->add_flag("--with-topics", f.with_topics, "Embed per-cluster topic reports (text only)");
  cluster->add_flag("--similarity-rows", f.similarity_rows, "Cluster text on cosine-similarity rows");
  auto* topics = app.add_subcommand("topics", "LDA topics per text cluster");
  topics->add_flag("--scan-k", f.scan_k, "Also fit K = 2..10 and report mean coherence per K");
  auto* repurpose = app.add_subcommand("repurpose", "Shared-segment detection between video pairs");
  repurpose->add_flag("--within-clusters", f.within_clusters, "Only compare videos in the same cluster");
  auto* pipeline = app.add_subcommand("pipeline", "Every stage, then summary.json");
  pipeline->add_flag("--scan-k", f.scan_k, "Topic K scan per text cluster");
  pipeline->add_flag("--within-clusters", f.within_clusters, "Restrict repurpose pairs to shared clusters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    PipelineConfig config = resolve_config(f);
    const bool seeded = !(barcode->parsed() || app.got_subcommand("audio") || app.got_subcommand("text"));
    config.validate(seeded);
    if (!config.manifest.empty() && !std::filesystem::exists(config.manifest)) {
      throw Error(ErrorKind::Usage, "manifest " + config.manifest.string() + " does not exist");
    }
    mediabar::Pipeline p(config);
    try {
      if (barcode->parsed()) {
        p.run_barcode();
      } else if (app.got_subcommand("audio")) {
        p.run_audio();
      } else if (app.got_subcommand("text")) {
        p.run_text();
      } else if (cluster->parsed()) {
        const Modality m = mediabar::modality_from_string(f.modality);
        const auto& run = p.run_cluster(m, f.with_topics);
        std::cout << to_string(m) << ": chosen_k=" << run.selection.chosen_k;
        if (run.selection.elbow_k) std::cout << " elbow_k=" << *run.selection.elbow_k;
        std::cout << "\n";
      } else if (topics->parsed()) {
        p.run_topics();
      } else if (repurpose->parsed()) {
        const auto& rep = p.run_repurpose();
        std::cout << rep.pairs.size() << " pair(s) with shared segments\n";
      } else if (pipeline->parsed()) {
        p.run_all();
      }
    } catch (const Error& e) {
      report(p);
      std::cerr << "mediabar: " << to_string(e.kind()) << ": " << e.what() << "\n";
      return e.kind() == ErrorKind::Usage ? kExitUsage : kExitVideoFailures;
    }
    report(p);
    return p.exit_code() == 0 ? kExitOk : kExitVideoFailures;
  } catch (const Error& e) {
    std::cerr << "mediabar: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return e.kind() == ErrorKind::Usage ? kExitUsage : kExitVideoFailures;
  } catch (const std::exception& e) {
    std::cerr << "mediabar: internal error: " << e.what() << "\n";
    return kExitVideoFailures;
  }
}
