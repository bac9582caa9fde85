#include <doctest.h>

#include "mediabar/error.hpp"
#include "mediabar/rng.hpp"
#include "mediabar/topics.hpp"
#include "oracles.hpp"

using namespace mediabar;

namespace {

std::vector<TokenizedDoc> two_vocab_corpus(std::uint64_t seed, int docs_per_half = 20, int tokens = 30) {
  const std::vector<std::string> pets{"cat", "dog", "pet"};
  const std::vector<std::string> money{"bond", "stock", "fund"};
  SplitMix64 rng(seed);
  std::vector<TokenizedDoc> docs;
  for (int half = 0; half < 2; ++half) {
    const auto& v = half == 0 ? pets : money;
    for (int d = 0; d < docs_per_half; ++d) {
      TokenizedDoc doc{(half ? "m" : "p") + std::to_string(d), {}};
      for (int t = 0; t < tokens; ++t) doc.tokens.push_back(v[rng.index(v.size())]);
      docs.push_back(doc);
    }
  }
  return docs;
}

bool single_half(const std::vector<std::string>& words) {
  const std::set<std::string> pets{"cat", "dog", "pet"};
  const auto n = std::count_if(words.begin(), words.end(), [&](const std::string& w) { return pets.count(w) > 0; });
  return n == 0 || n == static_cast<long>(words.size());
}

}  // namespace

TEST_CASE("lda on a single document") {
  std::vector<TokenizedDoc> docs{{"x", {"x", "x", "x"}}};
  LdaConfig cfg;
  cfg.n_topics = 2;
  cfg.report_topics = 2;
  cfg.iterations = 50;
  const auto m = lda_fit(docs, cfg);
  double t = 0;
  for (std::size_t k = 0; k < 2; ++k) t += m.theta_at(0, k);
  CHECK(t == doctest::Approx(1.0).epsilon(1e-9));
  for (std::size_t k = 0; k < 2; ++k) CHECK(m.phi_at(k, 0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("lda separates two disjoint vocabularies") {
  LdaConfig cfg;
  cfg.n_topics = 2;
  cfg.report_topics = 2;
  cfg.iterations = 300;
  cfg.seed = 3;
  auto docs = two_vocab_corpus(1);
  auto m = lda_fit(docs, cfg);
  for (std::size_t k = 0; k < 2; ++k) CHECK(single_half(top_words(m, k, 3)));
  const auto ranked = report_topics(m, docs, cfg);
  REQUIRE(ranked.size() == 2);
  for (const auto& r : ranked) {
    std::vector<std::string> first3(r.words.begin(), r.words.begin() + 3);
    CHECK(single_half(first3));
  }
  // normalization
  for (std::size_t k = 0; k < 2; ++k) {
    double s = 0;
    for (std::size_t w = 0; w < m.vocabulary.size(); ++w) s += m.phi_at(k, w);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
  }
  for (std::size_t d = 0; d < m.doc_ids.size(); ++d) {
    double s = 0;
    for (std::size_t k = 0; k < 2; ++k) s += m.theta_at(d, k);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("lda with a huge alpha gives near uniform theta") {
  LdaConfig cfg;
  cfg.n_topics = 4;
  cfg.alpha = 1e6;
  cfg.iterations = 20;
  const auto docs = two_vocab_corpus(2, 5, 10);
  const auto m = lda_fit(docs, cfg);
  for (std::size_t d = 0; d < m.doc_ids.size(); ++d)
    for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(m.theta_at(d, k) - 0.25) < 0.01);
}

TEST_CASE("gibbs counts are conserved after every sweep") {
  LdaConfig cfg;
  cfg.n_topics = 3;
  cfg.iterations = 40;
  cfg.seed = 9;
  auto docs = two_vocab_corpus(4, 6, 12);
  docs.push_back({"empty", {}});
  int sweeps = 0;
  bool ok = true;
  const auto m = lda_fit(docs, cfg, [&](int, const GibbsCounts& c) {
    ++sweeps;
    ok = ok && c.conserved();
    for (std::size_t d = 0; d < c.doc_words.size(); ++d) {
      int s = 0;
      for (std::size_t k = 0; k < c.n_topics; ++k) s += c.doc_topic[d * c.n_topics + k];
      ok = ok && s == static_cast<int>(c.doc_words[d].size());
    }
    for (std::size_t k = 0; k < c.n_topics; ++k) {
      int s = 0;
      for (std::size_t w = 0; w < c.n_words; ++w) s += c.topic_word[k * c.n_words + w];
      ok = ok && s == c.topic_total[k];
    }
  });
  CHECK(sweeps == 40);
  CHECK(ok);
  CHECK(m.dropped == std::vector<std::string>{"empty"});
  CHECK(m.doc_ids.size() == 12);
}

TEST_CASE("lda is deterministic") {
  LdaConfig cfg;
  cfg.n_topics = 3;
  cfg.iterations = 30;
  cfg.seed = 5;
  const auto docs = two_vocab_corpus(6, 5, 10);
  const auto a = lda_fit(docs, cfg);
  const auto b = lda_fit(docs, cfg);
  CHECK(a.phi == b.phi);
  CHECK(a.theta == b.theta);
}

TEST_CASE("umass examples") {
  // w1 in 5 docs, co-occurring with w2 in 3 of them
  std::vector<TokenizedDoc> docs;
  for (int i = 0; i < 5; ++i) docs.push_back({"d", i < 3 ? std::vector<std::string>{"w1", "w2"} : std::vector<std::string>{"w1"}});
  docs.push_back({"d", {"w2"}});
  const std::vector<std::string> top{"w1", "w2"};
  CHECK(umass_coherence(top, docs) == doctest::Approx(std::log(4.0 / 5.0)).epsilon(1e-12));
  CHECK(std::log(4.0 / 5.0) == doctest::Approx(-0.223144).epsilon(1e-6));

  std::vector<TokenizedDoc> always(4, TokenizedDoc{"d", {"a", "b"}});
  const std::vector<std::string> ab{"a", "b"};
  CHECK(umass_coherence(ab, always) == doctest::Approx(std::log(5.0 / 4.0)).epsilon(1e-12));
}

TEST_CASE("umass matches the document-scan oracle") {
  SplitMix64 rng(10);
  const std::vector<std::string> vocab{"a", "b", "c", "d", "e", "f", "g", "h"};
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<TokenizedDoc> docs;
    std::vector<std::vector<std::string>> raw;
    for (int d = 0; d < 15; ++d) {
      std::vector<std::string> t;
      for (int i = 0; i < 1 + static_cast<int>(rng.index(6)); ++i) t.push_back(vocab[rng.index(vocab.size())]);
      docs.push_back({"d", t});
      raw.push_back(t);
    }
    // top words must each occur somewhere
    std::set<std::string> present;
    for (const auto& t : raw) present.insert(t.begin(), t.end());
    std::vector<std::string> pool(present.begin(), present.end());
    std::vector<std::string> top;
    while (top.size() < 4 && !pool.empty()) {
      const auto i = rng.index(pool.size());
      top.push_back(pool[i]);
      pool.erase(pool.begin() + static_cast<long>(i));
    }
    CHECK(umass_coherence(top, docs) == oracle::umass(top, raw));
  }
}

TEST_CASE("report_topics ranking and ties") {
  LdaConfig cfg;
  cfg.n_topics = 3;
  cfg.iterations = 30;
  cfg.report_topics = 3;
  auto docs = two_vocab_corpus(8, 6, 10);
  auto m = lda_fit(docs, cfg);
  const auto r = report_topics(m, docs, cfg);
  REQUIRE(r.size() == 3);
  for (std::size_t i = 1; i < r.size(); ++i) CHECK(r[i - 1].coherence >= r[i].coherence);
  for (std::size_t i = 1; i < r.size(); ++i)
    if (r[i - 1].coherence == r[i].coherence) CHECK(r[i - 1].topic < r[i].topic);
  CHECK(r[0].words.size() == 6);  // vocabulary is smaller than top_words
}

TEST_CASE("lda config validation") {
  LdaConfig bad;
  bad.n_topics = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  LdaConfig beta;
  beta.beta = 0;
  CHECK_THROWS_AS(beta.validate(), Error);
  CHECK(LdaConfig{}.resolved_alpha() == doctest::Approx(5.0));
}
