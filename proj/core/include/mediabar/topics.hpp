#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mediabar/text_features.hpp"

namespace mediabar {

struct LdaConfig {
  int n_topics = 10;
  double alpha = 0.0;  // <= 0 means 50 / n_topics
  double beta = 0.01;
  int iterations = 1000;
  std::uint64_t seed = 0;
  int top_words = 10;
  int report_topics = 3;

  double resolved_alpha() const { return alpha > 0.0 ? alpha : 50.0 / n_topics; }
  void validate() const;
};

struct RankedTopic {
  int topic = 0;
  double coherence = 0.0;
  std::vector<std::string> words;
};

struct TopicModel {
  std::size_t n_topics = 0;
  std::vector<std::string> vocabulary;
  std::vector<std::string> doc_ids;  // documents that survived (non-empty)
  std::vector<double> phi;    // K x V
  std::vector<double> theta;  // D x K
  std::vector<double> coherence;  // per topic
  std::vector<RankedTopic> top_topics;
  std::vector<std::string> dropped;  // empty documents, by id

  double phi_at(std::size_t k, std::size_t w) const { return phi[k * vocabulary.size() + w]; }
  double theta_at(std::size_t d, std::size_t k) const { return theta[d * n_topics + k]; }
};

/// Count tables of the collapsed sampler, exposed for invariant checks.
struct GibbsCounts {
  std::size_t n_topics = 0;
  std::size_t n_words = 0;
  std::vector<std::vector<int>> doc_words;  // word index per token
  std::vector<std::vector<int>> topic_of;   // topic per token
  std::vector<int> doc_topic;    // D x K
  std::vector<int> topic_word;   // K x V
  std::vector<int> topic_total;  // K

  /// Recounts from the token assignments and compares; true when consistent.
  bool conserved() const;
};

using SweepObserver = std::function<void(int sweep, const GibbsCounts&)>;

/// Collapsed Gibbs sampling; empty documents are dropped (listed in `dropped`).
/// Does not rank topics; see report_topics.
TopicModel lda_fit(std::span<const TokenizedDoc> docs, const LdaConfig& config,
                   const SweepObserver& observer = {});

/// UMass: sum_{i>j} ln((D(w_i, w_j) + 1) / D(w_j)) over document frequencies.
double umass_coherence(std::span<const std::string> top_words, std::span<const TokenizedDoc> docs);

/// Top-M words per topic by phi (ties lexicographic), UMass-ranked, first
/// `report_topics` kept. Fills model.coherence and model.top_topics.
std::vector<RankedTopic> report_topics(TopicModel& model, std::span<const TokenizedDoc> docs,
                                       const LdaConfig& config);

std::vector<std::string> top_words(const TopicModel& model, std::size_t topic, std::size_t m);

struct KScanPoint {
  int n_topics = 0;
  double mean_coherence = 0.0;
};

/// Fits K = k_min..k_max with derived seeds and reports mean per-topic coherence.
std::vector<KScanPoint> scan_topic_counts(std::span<const TokenizedDoc> docs, const LdaConfig& config,
                                          int k_min = 2, int k_max = 10);

}  // namespace mediabar
