#include "mediabar/topics.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "mediabar/error.hpp"
#include "mediabar/rng.hpp"

namespace mediabar {

void LdaConfig::validate() const {
  auto fail = [](const std::string& why) { throw Error(ErrorKind::Precondition, "LdaConfig: " + why); };
  if (n_topics < 2) fail("n_topics must be >= 2");
  if (!(resolved_alpha() > 0.0) || !(beta > 0.0)) fail("alpha and beta must be positive");
  if (iterations < 0) fail("iterations must be >= 0");
  if (top_words < 2) fail("top_words must be >= 2");
  if (report_topics < 1 || report_topics > n_topics) fail("need 1 <= report_topics <= n_topics");
}

bool GibbsCounts::conserved() const {
  std::vector<int> dt(doc_topic.size(), 0), tw(topic_word.size(), 0), tt(topic_total.size(), 0);
  for (std::size_t d = 0; d < doc_words.size(); ++d) {
    for (std::size_t i = 0; i < doc_words[d].size(); ++i) {
      const auto z = static_cast<std::size_t>(topic_of[d][i]);
      const auto w = static_cast<std::size_t>(doc_words[d][i]);
      ++dt[d * n_topics + z];
      ++tw[z * n_words + w];
      ++tt[z];
    }
  }
  if (dt != doc_topic || tw != topic_word || tt != topic_total) return false;
  for (std::size_t d = 0; d < doc_words.size(); ++d) {
    int sum = 0;
    for (std::size_t k = 0; k < n_topics; ++k) sum += doc_topic[d * n_topics + k];
    if (sum != static_cast<int>(doc_words[d].size())) return false;
  }
  for (std::size_t k = 0; k < n_topics; ++k) {
    int sum = 0;
    for (std::size_t w = 0; w < n_words; ++w) sum += topic_word[k * n_words + w];
    if (sum != topic_total[k]) return false;
  }
  return true;
}

TopicModel lda_fit(std::span<const TokenizedDoc> docs, const LdaConfig& config, const SweepObserver& observer) {
  config.validate();
  TopicModel model;
  std::vector<const TokenizedDoc*> kept;
  for (const TokenizedDoc& d : docs) {
    if (d.tokens.empty()) {
      model.dropped.push_back(d.video_id);
    } else {
      kept.push_back(&d);
    }
  }
  if (kept.empty()) throw Error(ErrorKind::Precondition, "lda_fit: corpus has no non-empty documents");

  std::set<std::string> vocab;
  for (const TokenizedDoc* d : kept) vocab.insert(d->tokens.begin(), d->tokens.end());
  model.vocabulary.assign(vocab.begin(), vocab.end());
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < model.vocabulary.size(); ++i) index.emplace(model.vocabulary[i], static_cast<int>(i));

  const auto K = static_cast<std::size_t>(config.n_topics);
  const std::size_t V = model.vocabulary.size();
  const std::size_t D = kept.size();
  const double alpha = config.resolved_alpha();
  const double beta = config.beta;
  const double v_beta = static_cast<double>(V) * beta;

  GibbsCounts c;
  c.n_topics = K;
  c.n_words = V;
  c.doc_words.resize(D);
  c.topic_of.resize(D);
  c.doc_topic.assign(D * K, 0);
  c.topic_word.assign(K * V, 0);
  c.topic_total.assign(K, 0);

  SplitMix64 rng(config.seed);
  for (std::size_t d = 0; d < D; ++d) {
    model.doc_ids.push_back(kept[d]->video_id);
    for (const std::string& t : kept[d]->tokens) {
      const int w = index.at(t);
      const auto z = static_cast<int>(rng.index(K));
      c.doc_words[d].push_back(w);
      c.topic_of[d].push_back(z);
      ++c.doc_topic[d * K + static_cast<std::size_t>(z)];
      ++c.topic_word[static_cast<std::size_t>(z) * V + static_cast<std::size_t>(w)];
      ++c.topic_total[static_cast<std::size_t>(z)];
    }
  }

  std::vector<double> weight(K);
  for (int sweep = 1; sweep <= config.iterations; ++sweep) {
    for (std::size_t d = 0; d < D; ++d) {
      for (std::size_t i = 0; i < c.doc_words[d].size(); ++i) {
        const auto w = static_cast<std::size_t>(c.doc_words[d][i]);
        auto z = static_cast<std::size_t>(c.topic_of[d][i]);
        --c.doc_topic[d * K + z];
        --c.topic_word[z * V + w];
        --c.topic_total[z];

        double total = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
          total += (c.doc_topic[d * K + k] + alpha) * (c.topic_word[k * V + w] + beta) / (c.topic_total[k] + v_beta);
          weight[k] = total;
        }
        const double u = rng.uniform() * total;
        z = static_cast<std::size_t>(std::upper_bound(weight.begin(), weight.end(), u) - weight.begin());
        if (z >= K) z = K - 1;

        c.topic_of[d][i] = static_cast<int>(z);
        ++c.doc_topic[d * K + z];
        ++c.topic_word[z * V + w];
        ++c.topic_total[z];
      }
    }
    assert(c.conserved());
    if (observer) observer(sweep, c);
  }

  model.n_topics = K;
  model.phi.resize(K * V);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t w = 0; w < V; ++w) {
      model.phi[k * V + w] = (c.topic_word[k * V + w] + beta) / (c.topic_total[k] + v_beta);
    }
  }
  model.theta.resize(D * K);
  for (std::size_t d = 0; d < D; ++d) {
    const double denom = static_cast<double>(c.doc_words[d].size()) + static_cast<double>(K) * alpha;
    for (std::size_t k = 0; k < K; ++k) model.theta[d * K + k] = (c.doc_topic[d * K + k] + alpha) / denom;
  }
  return model;
}

double umass_coherence(std::span<const std::string> words, std::span<const TokenizedDoc> docs) {
  if (words.size() < 2) throw Error(ErrorKind::Precondition, "umass_coherence: need at least 2 words");
  std::vector<std::set<std::string_view>> present;
  present.reserve(docs.size());
  for (const TokenizedDoc& d : docs) present.emplace_back(d.tokens.begin(), d.tokens.end());

  std::vector<std::vector<bool>> has(words.size(), std::vector<bool>(docs.size()));
  std::vector<int> df(words.size(), 0);
  for (std::size_t i = 0; i < words.size(); ++i) {
    for (std::size_t d = 0; d < docs.size(); ++d) {
      has[i][d] = present[d].contains(words[i]);
      df[i] += has[i][d] ? 1 : 0;
    }
  }
  double score = 0.0;
  for (std::size_t i = 1; i < words.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (df[j] == 0) {
        throw Error(ErrorKind::Precondition, "umass_coherence: word '" + words[j] + "' occurs in no document");
      }
      int co = 0;
      for (std::size_t d = 0; d < docs.size(); ++d) co += (has[i][d] && has[j][d]) ? 1 : 0;
      score += std::log((co + 1.0) / df[j]);
    }
  }
  return score;
}

std::vector<std::string> top_words(const TopicModel& model, std::size_t topic, std::size_t m) {
  const std::size_t V = model.vocabulary.size();
  std::vector<std::size_t> order(V);
  std::iota(order.begin(), order.end(), 0);
  // Vocabulary is sorted, so index order is lexicographic order for ties.
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return model.phi_at(topic, a) > model.phi_at(topic, b); });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(m, V); ++i) out.push_back(model.vocabulary[order[i]]);
  return out;
}

std::vector<RankedTopic> report_topics(TopicModel& model, std::span<const TokenizedDoc> docs,
                                       const LdaConfig& config) {
  config.validate();
  std::vector<RankedTopic> all;
  model.coherence.assign(model.n_topics, 0.0);
  for (std::size_t k = 0; k < model.n_topics; ++k) {
    RankedTopic t;
    t.topic = static_cast<int>(k);
    t.words = top_words(model, k, static_cast<std::size_t>(config.top_words));
    t.coherence = t.words.size() >= 2 ? umass_coherence(t.words, docs) : 0.0;
    model.coherence[k] = t.coherence;
    all.push_back(std::move(t));
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const RankedTopic& a, const RankedTopic& b) { return a.coherence > b.coherence; });
  all.resize(std::min(all.size(), static_cast<std::size_t>(config.report_topics)));
  model.top_topics = all;
  return all;
}

std::vector<KScanPoint> scan_topic_counts(std::span<const TokenizedDoc> docs, const LdaConfig& config, int k_min,
                                          int k_max) {
  std::vector<KScanPoint> out;
  for (int k = k_min; k <= k_max; ++k) {
    LdaConfig c = config;
    c.n_topics = k;
    c.alpha = config.alpha > 0.0 ? config.alpha : 0.0;
    c.report_topics = std::min(config.report_topics, k);
    c.seed = derive_seed(config.seed, static_cast<std::uint64_t>(k));
    TopicModel m = lda_fit(docs, c);
    report_topics(m, docs, c);
    double mean = 0.0;
    for (double v : m.coherence) mean += v;
    out.push_back({k, mean / static_cast<double>(m.coherence.size())});
  }
  return out;
}

}  // namespace mediabar
