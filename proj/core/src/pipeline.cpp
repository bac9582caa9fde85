#include "mediabar/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "mediabar/error.hpp"
#include "mediabar/rng.hpp"

namespace mediabar {

namespace fs = std::filesystem;

// ---------------------------------------------------------------- config

void PipelineConfig::validate(bool need_seed) const {
  auto fail = [](const std::string& why) { throw Error(ErrorKind::Usage, why); };
  if (out_dir.empty()) fail("--out is required");
  if (need_seed && !seed) fail("--seed is required (no implicit entropy)");
  if (k_min < 2 || k_max < k_min) fail("k range must satisfy 2 <= k_min <= k_max");
  if (restarts < 1) fail("restarts must be >= 1");
  if (barcode_length < 2) fail("barcode_length must be >= 2");
  if (frame_stride < 1) fail("frame_stride must be >= 1");
  if (barcode_height < 1) fail("barcode_height must be >= 1");
  if (envelope_bins < 1) fail("envelope_bins must be >= 1");
  if (exemplars < 1) fail("exemplars must be >= 1");
  try {
    barcode_match.validate();
    lda.validate();
    MfccConfig probe = mfcc;
    if (!probe.fmax) probe.fmax = std::max(probe.fmin + 1.0, 1.0);
    probe.validate(std::max(1, static_cast<int>(2.0 * *probe.fmax)));
  } catch (const Error& e) {
    fail(e.what());
  }
}

namespace {

template <typename T>
void read_key(const Json& obj, const char* key, T& out, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return;
  try {
    out = it->get<T>();
  } catch (const Json::exception&) {
    throw Error(ErrorKind::Usage, "config: bad value for '" + where + key + "'");
  }
}

template <typename T>
void read_key(const Json& obj, const char* key, std::optional<T>& out, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return;
  T v{};
  read_key(obj, key, v, where);
  out = v;
}

void read_path(const Json& obj, const char* key, fs::path& out) {
  std::string s;
  read_key(obj, key, s, "");
  if (!s.empty()) out = s;
}

void check_keys(const Json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw Error(ErrorKind::Usage, "config: '" + where + "' must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw Error(ErrorKind::Usage, "config: unknown key '" + where + key + "'");
    }
  }
}

void read_match(const Json& obj, MatchConfig& m, const std::string& where) {
  check_keys(obj, {"window", "step_a", "threshold", "diagonal_slack", "min_len"}, where);
  read_key(obj, "window", m.window, where);
  read_key(obj, "step_a", m.step_a, where);
  read_key(obj, "threshold", m.threshold, where);
  read_key(obj, "diagonal_slack", m.diagonal_slack, where);
  read_key(obj, "min_len", m.min_len, where);
}

Json match_json(int window, int step, double threshold, int slack, std::optional<int> min_len) {
  return {{"window", window},
          {"step_a", step},
          {"threshold", sig9(threshold)},
          {"diagonal_slack", slack},
          {"min_len", min_len ? Json(*min_len) : Json(nullptr)}};
}

}  // namespace

PipelineConfig config_from_json(const Json& doc, PipelineConfig c) {
  check_keys(doc,
             {"manifest", "out", "seed", "barcode", "audio", "text", "topics", "repurpose", "k_min", "k_max",
              "restarts", "barcode_length", "frame_stride", "barcode_height", "envelope_bins", "exemplars", "mfcc",
              "lda", "barcode_match", "audio_match", "stopwords", "text_similarity_rows", "topics_scan_k",
              "within_clusters"},
             "");
  read_path(doc, "manifest", c.manifest);
  read_path(doc, "out", c.out_dir);
  read_key(doc, "seed", c.seed, "");
  read_key(doc, "barcode", c.barcode, "");
  read_key(doc, "audio", c.audio, "");
  read_key(doc, "text", c.text, "");
  read_key(doc, "topics", c.topics, "");
  read_key(doc, "repurpose", c.repurpose, "");
  read_key(doc, "k_min", c.k_min, "");
  read_key(doc, "k_max", c.k_max, "");
  read_key(doc, "restarts", c.restarts, "");
  read_key(doc, "barcode_length", c.barcode_length, "");
  read_key(doc, "frame_stride", c.frame_stride, "");
  read_key(doc, "barcode_height", c.barcode_height, "");
  read_key(doc, "envelope_bins", c.envelope_bins, "");
  read_key(doc, "exemplars", c.exemplars, "");
  if (auto it = doc.find("mfcc"); it != doc.end()) {
    check_keys(*it, {"frame_size", "hop", "n_mels", "n_mfcc", "fmin", "fmax", "log_floor"}, "mfcc.");
    read_key(*it, "frame_size", c.mfcc.frame_size, "mfcc.");
    read_key(*it, "hop", c.mfcc.hop, "mfcc.");
    read_key(*it, "n_mels", c.mfcc.n_mels, "mfcc.");
    read_key(*it, "n_mfcc", c.mfcc.n_mfcc, "mfcc.");
    read_key(*it, "fmin", c.mfcc.fmin, "mfcc.");
    read_key(*it, "fmax", c.mfcc.fmax, "mfcc.");
    read_key(*it, "log_floor", c.mfcc.log_floor, "mfcc.");
  }
  if (auto it = doc.find("lda"); it != doc.end()) {
    check_keys(*it, {"n_topics", "alpha", "beta", "iterations", "top_words", "report_topics"}, "lda.");
    read_key(*it, "n_topics", c.lda.n_topics, "lda.");
    read_key(*it, "alpha", c.lda.alpha, "lda.");
    read_key(*it, "beta", c.lda.beta, "lda.");
    read_key(*it, "iterations", c.lda.iterations, "lda.");
    read_key(*it, "top_words", c.lda.top_words, "lda.");
    read_key(*it, "report_topics", c.lda.report_topics, "lda.");
  }
  if (auto it = doc.find("barcode_match"); it != doc.end()) read_match(*it, c.barcode_match, "barcode_match.");
  if (auto it = doc.find("audio_match"); it != doc.end()) {
    check_keys(*it, {"window", "step_a", "threshold", "diagonal_slack", "min_len"}, "audio_match.");
    read_key(*it, "window", c.audio_match.window, "audio_match.");
    read_key(*it, "step_a", c.audio_match.step_a, "audio_match.");
    read_key(*it, "threshold", c.audio_match.threshold, "audio_match.");
    read_key(*it, "diagonal_slack", c.audio_match.diagonal_slack, "audio_match.");
    read_key(*it, "min_len", c.audio_match.min_len, "audio_match.");
  }
  std::string stop;
  read_key(doc, "stopwords", stop, "");
  if (!stop.empty()) c.stopwords = stop;
  read_key(doc, "text_similarity_rows", c.text_similarity_rows, "");
  read_key(doc, "topics_scan_k", c.topics_scan_k, "");
  read_key(doc, "within_clusters", c.within_clusters, "");
  return c;
}

Json config_to_json(const PipelineConfig& c) {
  Json doc;
  doc["seed"] = c.seed ? Json(*c.seed) : Json(nullptr);
  doc["barcode"] = c.barcode;
  doc["audio"] = c.audio;
  doc["text"] = c.text;
  doc["topics"] = c.topics;
  doc["repurpose"] = c.repurpose;
  doc["k_min"] = c.k_min;
  doc["k_max"] = c.k_max;
  doc["restarts"] = c.restarts;
  doc["barcode_length"] = c.barcode_length;
  doc["frame_stride"] = c.frame_stride;
  doc["barcode_height"] = c.barcode_height;
  doc["envelope_bins"] = c.envelope_bins;
  doc["exemplars"] = c.exemplars;
  doc["mfcc"] = {{"frame_size", c.mfcc.frame_size},
                 {"hop", c.mfcc.hop},
                 {"n_mels", c.mfcc.n_mels},
                 {"n_mfcc", c.mfcc.n_mfcc},
                 {"fmin", sig9(c.mfcc.fmin)},
                 {"fmax", c.mfcc.fmax ? Json(sig9(*c.mfcc.fmax)) : Json(nullptr)},
                 {"log_floor", sig9(c.mfcc.log_floor)}};
  doc["lda"] = {{"n_topics", c.lda.n_topics},
                {"alpha", sig9(c.lda.resolved_alpha())},
                {"beta", sig9(c.lda.beta)},
                {"iterations", c.lda.iterations},
                {"top_words", c.lda.top_words},
                {"report_topics", c.lda.report_topics}};
  const MatchConfig& b = c.barcode_match;
  doc["barcode_match"] = match_json(b.window, b.step_a, b.threshold, b.diagonal_slack, b.min_len);
  const AudioMatchSettings& a = c.audio_match;
  doc["audio_match"] = match_json(a.window.value_or(0), a.step_a, a.threshold, a.diagonal_slack, a.min_len);
  if (!a.window) doc["audio_match"]["window"] = nullptr;
  doc["stopwords"] = c.stopwords ? Json(c.stopwords->filename().string()) : Json(nullptr);
  doc["text_similarity_rows"] = c.text_similarity_rows;
  doc["topics_scan_k"] = c.topics_scan_k;
  doc["within_clusters"] = c.within_clusters;
  return doc;
}

// ---------------------------------------------------------------- pipeline

namespace {

std::string safe_name(const std::string& id) {
  if (id.empty() || id == "." || id == ".." || id.find('/') != std::string::npos ||
      id.find('\\') != std::string::npos) {
    throw Error(ErrorKind::Schema, "video id '" + id + "' cannot be used as a file name");
  }
  return id;
}

FrameImage solid_swatch(const Color& c, int size) {
  return FrameImage(size, size, Rgb8{round_channel(c.r), round_channel(c.g), round_channel(c.b)});
}

}  // namespace

Pipeline::Pipeline(PipelineConfig config) : config_(std::move(config)) {}

std::uint64_t Pipeline::seed() const {
  if (!config_.seed) throw Error(ErrorKind::Usage, "--seed is required (no implicit entropy)");
  return *config_.seed;
}

const Manifest& Pipeline::manifest() {
  if (!manifest_) {
    if (!has_manifest()) throw Error(ErrorKind::Usage, "no manifest given (--manifest)");
    try {
      manifest_ = load_manifest(config_.manifest);
    } catch (const Error& e) {
      throw Error(ErrorKind::Usage, std::string(to_string(e.kind())) + ": " + e.what());
    }
  }
  return *manifest_;
}

void Pipeline::emit(const std::string& rel_path, const std::string& bytes) {
  const fs::path full = config_.out_dir / rel_path;
  fs::create_directories(full.parent_path());
  std::ofstream out(full, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + full.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::Io, "write failed for " + full.string());
  artifacts_[rel_path] = sha256_hex(bytes);
}

void Pipeline::exclude(Modality m, const std::string& id, const std::string& reason) {
  excluded_[to_string(m)][id] = reason;
  errors_.push_back(std::string(to_string(m)) + ": video '" + id + "': " + reason);
}

void Pipeline::record_stage(const std::string& stage, const std::string& status) { stages_[stage] = status; }

int Pipeline::exit_code() const {
  if (!errors_.empty()) return 1;
  for (const auto& [stage, status] : stages_) {
    if (status != "ok") return 1;
  }
  return 0;
}

const std::optional<ClusterRun>& Pipeline::cluster_run(Modality m) const {
  static const std::optional<ClusterRun> none;
  auto it = clusters_.find(m);
  return it == clusters_.end() ? none : it->second;
}

const std::vector<Barcode>& Pipeline::barcodes() {
  if (!barcodes_) run_barcode();
  return *barcodes_;
}

void Pipeline::run_barcode() {
  const Manifest& man = manifest();
  std::vector<Barcode> barcodes;
  FeatureMatrix features;
  features.modality = Modality::Barcode;
  for (const VideoEntry& v : man.videos) {
    try {
      const std::string name = safe_name(v.id);
      const std::vector<FrameImage> frames = read_frames(v.frames, config_.frame_stride);
      Barcode bc = build_barcode(frames, v.id);
      emit("barcode/" + name + ".barcode.ppm", encode_ppm(render_barcode(bc, config_.barcode_height)));
      features.append(v.id, barcode_feature(bc, config_.barcode_length).values);
      barcodes.push_back(std::move(bc));
    } catch (const Error& e) {
      exclude(Modality::Barcode, v.id, e.what());
    }
  }
  features.dims = static_cast<std::size_t>(3 * config_.barcode_length);
  emit("barcode/features.csv", features_to_csv(features, "f"));
  barcodes_ = std::move(barcodes);
  barcode_features_ = std::move(features);
  record_stage("barcode", "ok");
}

void Pipeline::run_audio() {
  const Manifest& man = manifest();
  FeatureMatrix features;
  features.modality = Modality::Audio;
  mfccs_.clear();
  mfcc_rates_.clear();
  for (const VideoEntry& v : man.videos) {
    try {
      const std::string name = safe_name(v.id);
      const AudioClip clip = read_wav(v.audio.path);
      MfccMatrix m = mfcc(clip, config_.mfcc, v.id);
      const AudioFeature f = summarize_mfcc(m);
      emit("audio/envelopes/" + name + ".csv",
           envelope_to_csv(waveform_envelope(clip, static_cast<std::size_t>(config_.envelope_bins))));
      features.append(v.id, f.values);
      mfccs_.push_back(std::move(m));
      mfcc_rates_.push_back(clip.sample_rate);
    } catch (const Error& e) {
      exclude(Modality::Audio, v.id, e.what());
    }
  }
  features.dims = static_cast<std::size_t>(2 * config_.mfcc.n_mfcc);
  emit("audio/features.csv", features_to_csv(features, "a"));
  audio_features_ = std::move(features);
  record_stage("audio", "ok");
}

void Pipeline::run_text() {
  const Manifest& man = manifest();
  const StopWords stop = config_.stopwords ? load_stopwords(*config_.stopwords) : default_stopwords();
  std::vector<std::string> ids;
  std::vector<TextSidecars> sidecars;
  std::vector<const VideoEntry*> entries;
  for (const VideoEntry& v : man.videos) {
    try {
      sidecars.push_back(read_text_sidecars(v));
      ids.push_back(v.id);
      entries.push_back(&v);
    } catch (const Error& e) {
      exclude(Modality::Text, v.id, e.what());
    }
  }
  try {
    check_embedding_lengths(ids, sidecars);
  } catch (const Error& e) {
    record_stage("text", std::string("failed: ") + e.what());
    throw;
  }

  std::vector<TokenizedDoc> docs;
  std::vector<std::optional<std::vector<double>>> embeddings;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    docs.push_back(tokenize(composite_doc(*entries[i], sidecars[i].transcript), stop));
    embeddings.push_back(sidecars[i].embedding);
  }
  TextFeatures tf;
  try {
    tf = build_text_features(docs, embeddings);
  } catch (const Error& e) {
    record_stage("text", std::string("failed: ") + e.what());
    throw;
  }

  // Zero rows (no usable tokens) cannot take part in cosine similarity.
  FeatureMatrix kept;
  kept.modality = Modality::Text;
  kept.dims = tf.matrix.dims;
  std::vector<TokenizedDoc> kept_docs;
  for (std::size_t i = 0; i < tf.matrix.size(); ++i) {
    const auto row = tf.matrix.row(i);
    if (std::all_of(row.begin(), row.end(), [](double v) { return v == 0.0; })) {
      exclude(Modality::Text, tf.matrix.ids[i], "text vector is all zeros (no usable tokens)");
      continue;
    }
    kept.append(tf.matrix.ids[i], row);
    kept_docs.push_back(docs[i]);
  }
  tf.matrix = std::move(kept);

  emit("text/features.csv", features_to_csv(tf.matrix, "t"));
  if (tf.source == TextSource::Tfidf) emit("text/vocabulary.txt", vocabulary_to_text(tf.vocabulary));
  if (tf.matrix.size() >= 1) {
    emit("text/similarity.csv", similarity_to_csv(tf.matrix.ids, cosine_similarity_matrix(tf.matrix)));
  }
  text_features_ = std::move(tf);
  docs_ = std::move(kept_docs);
  record_stage("text", "ok");
}

FeatureMatrix Pipeline::features_for(Modality m) {
  std::optional<FeatureMatrix>* cached = nullptr;
  switch (m) {
    case Modality::Barcode: cached = &barcode_features_; break;
    case Modality::Audio: cached = &audio_features_; break;
    case Modality::Text:
      if (!text_features_ && has_manifest()) run_text();
      if (text_features_) return text_features_->matrix;
      break;
  }
  if (cached) {
    if (!*cached && has_manifest()) {
      if (m == Modality::Barcode) {
        run_barcode();
      } else {
        run_audio();
      }
    }
    if (*cached) return **cached;
  }
  const std::string rel = std::string(to_string(m)) + "/features.csv";
  const fs::path csv = config_.out_dir / rel;
  if (!fs::exists(csv)) {
    throw Error(ErrorKind::Precondition, std::string(to_string(m)) + " features not found in " +
                                      config_.out_dir.string() + " and no manifest given");
  }
  return features_from_csv(read_text_file(csv), m);
}

std::vector<ClusterProfile> Pipeline::build_profiles(Modality m, const ClusterRun& run) {
  std::vector<ClusterProfile> profiles(static_cast<std::size_t>(run.model.k));
  for (int c = 0; c < run.model.k; ++c) {
    profiles[static_cast<std::size_t>(c)].modality = m;
    profiles[static_cast<std::size_t>(c)].cluster = c;
  }
  std::vector<std::vector<std::pair<double, std::string>>> dist(profiles.size());
  for (std::size_t i = 0; i < run.features.size(); ++i) {
    const int c = run.model.assignments[i];
    profiles[static_cast<std::size_t>(c)].members.push_back(run.features.ids[i]);
    dist[static_cast<std::size_t>(c)].emplace_back(squared_distance(run.features.row(i), run.model.center(c)),
                                                   run.features.ids[i]);
  }
  for (std::size_t c = 0; c < profiles.size(); ++c) {
    std::sort(profiles[c].members.begin(), profiles[c].members.end());
    std::sort(dist[c].begin(), dist[c].end());
    for (std::size_t e = 0; e < std::min(dist[c].size(), static_cast<std::size_t>(config_.exemplars)); ++e) {
      profiles[c].exemplars.push_back(dist[c][e].second);
    }
  }

  if (m == Modality::Barcode) {
    std::map<std::string, const Barcode*> by_id;
    std::vector<Barcode> from_images;
    if (barcodes_ || has_manifest()) {
      for (const Barcode& b : barcodes()) by_id[b.video_id] = &b;
    } else {
      // Recover colors from rendered barcodes (rounded to integers).
      for (const std::string& id : run.features.ids) {
        const fs::path ppm = config_.out_dir / "barcode" / (safe_name(id) + ".barcode.ppm");
        if (fs::exists(ppm)) from_images.push_back(barcode_from_image(read_ppm(ppm), id));
      }
      for (const Barcode& b : from_images) by_id[b.video_id] = &b;
    }
    for (ClusterProfile& p : profiles) {
      std::vector<const Barcode*> members;
      for (const std::string& id : p.members) {
        if (auto it = by_id.find(id); it != by_id.end()) members.push_back(it->second);
      }
      if (!members.empty()) p.avg_rgb = cluster_avg_color(std::span<const Barcode* const>(members));
    }
  }
  if (m == Modality::Text) {
    for (ClusterProfile& p : profiles) {
      if (auto it = topic_reports_.find(p.cluster); it != topic_reports_.end()) p.topics = it->second;
    }
  }
  return profiles;
}

void Pipeline::write_profiles(Modality m, const ClusterRun& run) {
  Json clusters = Json::array();
  for (const ClusterProfile& p : run.profiles) {
    Json j;
    j["cluster"] = p.cluster;
    j["size"] = p.members.size();
    j["members"] = p.members;
    j["exemplars"] = p.exemplars;
    if (p.avg_rgb) {
      j["avg_rgb"] = {sig9(p.avg_rgb->r), sig9(p.avg_rgb->g), sig9(p.avg_rgb->b)};
      const std::string swatch = "clusters/barcode.swatch." + std::to_string(p.cluster) + ".ppm";
      emit(swatch, encode_ppm(solid_swatch(*p.avg_rgb, 32)));
      j["swatch"] = swatch;
    }
    if (p.topics) j["topics"] = topic_report_to_json(p.cluster, config_.lda, *p.topics)["topics"];
    clusters.push_back(std::move(j));
  }
  Json doc;
  doc["modality"] = to_string(m);
  doc["clusters"] = clusters;
  emit("clusters/" + std::string(to_string(m)) + ".profiles.json", dump_json(doc));
}

const ClusterRun& Pipeline::run_cluster(Modality m, bool with_topics) {
  const std::uint64_t s = seed();
  const std::string stage = std::string("cluster_") + to_string(m);
  try {
    ClusterRun run;
    run.features = features_for(m);
    if (m == Modality::Text && config_.text_similarity_rows) {
      FeatureMatrix sim;
      sim.modality = Modality::Text;
      sim.ids = run.features.ids;
      sim.dims = run.features.size();
      sim.data = cosine_similarity_matrix(run.features);
      run.features = std::move(sim);
    }
    const auto n = static_cast<int>(run.features.size());
    if (n < config_.k_min) {
      throw Error(ErrorKind::Precondition, std::string(to_string(m)) + " clustering: " + std::to_string(n) +
                                               " videos, fewer than k_min=" + std::to_string(config_.k_min));
    }
    ChooseKOptions opts;
    opts.k_min = config_.k_min;
    opts.k_max = std::min(config_.k_max, n);
    opts.restarts = config_.restarts;
    ChooseKResult res = choose_k(run.features, s, opts);
    run.selection = std::move(res.selection);
    run.model = std::move(res.model);
    emit("clusters/" + std::string(to_string(m)) + ".json",
         dump_json(clustering_to_json(m, s, run.selection, run.model, run.features.ids)));
    clusters_[m] = std::move(run);
    if (m == Modality::Text && with_topics) fit_topics(*clusters_[m]);
    clusters_[m]->profiles = build_profiles(m, *clusters_[m]);
    write_profiles(m, *clusters_[m]);
    record_stage(stage, "ok");
    return *clusters_[m];
  } catch (const Error& e) {
    record_stage(stage, std::string("failed: ") + e.what());
    throw;
  }
}

void Pipeline::fit_topics(const ClusterRun& text_run) {
  if (docs_.empty() && has_manifest() && !text_features_) run_text();
  if (docs_.empty()) throw Error(ErrorKind::Precondition, "topics need tokenized documents; give --manifest");
  std::map<std::string, const TokenizedDoc*> by_id;
  for (const TokenizedDoc& d : docs_) by_id[d.video_id] = &d;

  topic_reports_.clear();
  for (int c = 0; c < text_run.model.k; ++c) {
    std::vector<TokenizedDoc> cluster_docs;
    for (std::size_t i = 0; i < text_run.features.size(); ++i) {
      if (text_run.model.assignments[i] != c) continue;
      if (auto it = by_id.find(text_run.features.ids[i]); it != by_id.end()) cluster_docs.push_back(*it->second);
    }
    LdaConfig lda = config_.lda;
    lda.seed = derive_seed(seed(), static_cast<std::uint64_t>(c));
    const std::string rel = "topics/cluster_" + std::to_string(c);
    TopicModel model;
    try {
      model = lda_fit(cluster_docs, lda);
    } catch (const Error& e) {
      errors_.push_back("topics: cluster " + std::to_string(c) + ": " + e.what());
      continue;
    }
    for (const std::string& id : model.dropped) {
      errors_.push_back("topics: cluster " + std::to_string(c) + ": video '" + id + "' has no tokens (dropped)");
    }
    const std::vector<RankedTopic> ranked = report_topics(model, cluster_docs, lda);
    emit(rel + ".json", dump_json(topic_report_to_json(c, lda, ranked)));
    if (config_.topics_scan_k) {
      emit(rel + ".scan.json", dump_json(topic_scan_to_json(c, scan_topic_counts(cluster_docs, lda))));
    }
    topic_reports_[c] = ranked;
  }
  record_stage("topics", "ok");
}

void Pipeline::run_topics() {
  const ClusterRun* run = nullptr;
  if (clusters_[Modality::Text]) {
    run = &*clusters_[Modality::Text];
  } else {
    run = &run_cluster(Modality::Text, true);
    return;
  }
  try {
    fit_topics(*run);
  } catch (const Error& e) {
    record_stage("topics", std::string("failed: ") + e.what());
    throw;
  }
}

const RepurposeReport& Pipeline::run_repurpose() {
  try {
    const Manifest& man = manifest();
    if (man.videos.size() < 2) {
      throw Error(ErrorKind::Precondition, "repurpose: need at least 2 videos, manifest has " +
                                               std::to_string(man.videos.size()));
    }
    std::vector<ModalitySignatures> sigs;
    if (config_.barcode) {
      ModalitySignatures s;
      s.modality = Modality::Barcode;
      s.config = config_.barcode_match;
      for (const Barcode& b : barcodes()) {
        Sequence seq{b.video_id, 3, {}};
        for (const Color& c : b.colors) seq.data.insert(seq.data.end(), {c.r, c.g, c.b});
        s.sequences.push_back(std::move(seq));
      }
      sigs.push_back(std::move(s));
    }
    if (config_.audio) {
      if (!audio_features_) run_audio();
      ModalitySignatures s;
      s.modality = Modality::Audio;
      for (std::size_t i = 0; i < mfccs_.size(); ++i) {
        s.sequences.push_back({mfccs_[i].video_id, mfccs_[i].cols, mfccs_[i].data});
        const AudioMatchSettings& a = config_.audio_match;
        MatchConfig mc = MatchConfig::audio_defaults(
            a.window.value_or(frames_for_duration(2.0, mfcc_rates_[i], config_.mfcc)));
        mc.step_a = a.step_a;
        mc.threshold = a.threshold;
        mc.diagonal_slack = a.diagonal_slack;
        mc.min_len = a.min_len;
        s.per_sequence.push_back(mc);
        if (i == 0) s.config = mc;
      }
      sigs.push_back(std::move(s));
    }

    PairFilter filter;
    if (config_.within_clusters) {
      std::map<Modality, std::map<std::string, int>> assignment;
      for (const ModalitySignatures& s : sigs) {
        if (!clusters_[s.modality]) run_cluster(s.modality, false);
        const ClusterRun& run = *clusters_[s.modality];
        for (std::size_t i = 0; i < run.features.size(); ++i) {
          assignment[s.modality][run.features.ids[i]] = run.model.assignments[i];
        }
      }
      filter = [assignment](const std::string& a, const std::string& b, Modality m) {
        const auto& table = assignment.at(m);
        auto ia = table.find(a), ib = table.find(b);
        return ia != table.end() && ib != table.end() && ia->second == ib->second;
      };
    }
    repurpose_ = scan_corpus(sigs, filter);
    emit("repurpose/report.json", dump_json(repurpose_to_json(*repurpose_)));
    record_stage("repurpose", "ok");
    return *repurpose_;
  } catch (const Error& e) {
    record_stage("repurpose", std::string("failed: ") + e.what());
    throw;
  }
}

void Pipeline::run_all() {
  seed();
  manifest();
  auto guarded = [&](const std::function<void()>& stage) {
    try {
      stage();
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Usage) throw;
      // Recorded in stage status; downstream stages decide for themselves.
    }
  };
  if (config_.barcode) guarded([&] { run_barcode(); });
  if (config_.audio) guarded([&] { run_audio(); });
  if (config_.text) guarded([&] { run_text(); });
  if (config_.barcode && barcode_features_) guarded([&] { run_cluster(Modality::Barcode); });
  if (config_.audio && audio_features_) guarded([&] { run_cluster(Modality::Audio); });
  if (config_.text && text_features_) guarded([&] { run_cluster(Modality::Text, config_.topics); });
  if (config_.repurpose && (config_.barcode || config_.audio)) guarded([&] { run_repurpose(); });
  write_summary();
}

void Pipeline::write_summary() {
  Json doc;
  doc["corpus_id"] = manifest_ ? Json(manifest_->corpus_id) : Json(nullptr);
  doc["seed"] = config_.seed ? Json(*config_.seed) : Json(nullptr);
  doc["config"] = config_to_json(config_);
  doc["stages"] = stages_;
  doc["excluded"] = excluded_;
  doc["errors"] = errors_;
  Json arts = Json::array();
  for (const auto& [path, sha] : artifacts_) arts.push_back({{"path", path}, {"sha256", sha}});
  doc["artifacts"] = arts;
  doc["exit_code"] = exit_code();
  const std::string bytes = dump_json(doc);
  const fs::path full = config_.out_dir / "summary.json";
  fs::create_directories(config_.out_dir);
  std::ofstream out(full, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + full.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace mediabar
