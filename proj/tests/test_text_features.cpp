#include <doctest.h>

#include <cmath>

#include "mediabar/error.hpp"
#include "mediabar/text_features.hpp"

using namespace mediabar;

namespace {

TokenizedDoc doc(std::string id, std::vector<std::string> tokens) { return {std::move(id), std::move(tokens)}; }

std::vector<std::string> toks(const std::string& text, const StopWords& sw) {
  return tokenize(CompositeDoc{"d", text}, sw).tokens;
}

}  // namespace

TEST_CASE("composite_doc") {
  VideoEntry e;
  e.id = "v";
  e.title = "T";
  e.description = "D";
  CHECK(composite_doc(e, "X").text == "T\nD\nX");
  e.title = e.description = "";
  CHECK(composite_doc(e, "").text == "\n\n");
  e.title = "Biển Đông";
  CHECK(composite_doc(e, "").text == "Biển Đông\n\n");
}

TEST_CASE("tokenize") {
  CHECK(toks("The South China-Sea!", StopWords{"the"}) == std::vector<std::string>{"south", "china", "sea"});
  CHECK(toks("a an of", StopWords{"a", "an", "of"}).empty());
  CHECK(toks("Navy2024 strategy", default_stopwords()) == std::vector<std::string>{"navy", "strategy"});
  CHECK(toks("uh ok fleet", StopWords{}) == std::vector<std::string>{"fleet"});
}

TEST_CASE("tokenize is idempotent on its own output") {
  const std::string text = "Navy PATROLS near the reef; coast-guard vessels, 2024 and beyond!";
  const auto once = toks(text, default_stopwords());
  std::string joined;
  for (const auto& t : once) joined += t + " ";
  CHECK(toks(joined, default_stopwords()) == once);
}

TEST_CASE("stop-word list") {
  const auto& sw = default_stopwords();
  CHECK(sw.size() >= 150);
  CHECK(sw.count("the") == 1);
  CHECK(sw.count("navy") == 0);
  const auto custom = parse_stopwords("Foo\n# comment\n\nbar  \n");
  CHECK(custom == StopWords{"foo", "bar"});
}

TEST_CASE("tfidf oracle") {
  std::vector<TokenizedDoc> docs{doc("d1", {"a", "b"}), doc("d2", {"a", "c"})};
  const auto r = tfidf_matrix(docs);
  CHECK(r.vocabulary == std::vector<std::string>{"a", "b", "c"});
  const double idf_b = std::log(1.5) + 1.0;
  const double x = 0.5, y = 0.5 * idf_b;
  CHECK(y == doctest::Approx(0.702733).epsilon(1e-6));
  const double n = std::hypot(x, y);
  CHECK(r.matrix.at(0, 0) == doctest::Approx(x / n).epsilon(1e-12));
  CHECK(r.matrix.at(0, 1) == doctest::Approx(y / n).epsilon(1e-12));
  CHECK(r.matrix.at(0, 2) == 0.0);
}

TEST_CASE("tfidf properties") {
  std::vector<TokenizedDoc> docs{doc("d1", {"sea", "reef", "reef"}), doc("d2", {"sea", "reef", "reef"}),
                                 doc("d3", {"sea", "bank"}), doc("d4", {"stock", "sea", "bank", "bank"})};
  const auto r = tfidf_matrix(docs);
  for (std::size_t d = 0; d < r.matrix.dims; ++d) CHECK(r.matrix.at(0, d) == r.matrix.at(1, d));
  for (std::size_t i = 0; i < 4; ++i) {
    double s = 0.0;
    for (double v : r.matrix.row(i)) s += v * v;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
  // doubling every document leaves rows unchanged
  std::vector<TokenizedDoc> doubled = docs;
  for (auto& d : doubled) {
    const auto copy = d.tokens;
    d.tokens.insert(d.tokens.end(), copy.begin(), copy.end());
  }
  const auto r2 = tfidf_matrix(doubled);
  for (std::size_t i = 0; i < r.matrix.data.size(); ++i) CHECK(r2.matrix.data[i] == doctest::Approx(r.matrix.data[i]).epsilon(1e-12));

  const auto s = cosine_similarity_matrix(r.matrix);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(s[i * 4 + i] == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(s[i * 4 + j] - s[j * 4 + i]) <= 1e-12);
  }
}

TEST_CASE("cosine similarity") {
  FeatureMatrix m;
  m.dims = 3;
  m.append("a", std::vector<double>{1, 2, 2});
  m.append("b", std::vector<double>{2, 1, 2});
  m.append("c", std::vector<double>{1, 2, 2});
  m.append("d", std::vector<double>{2, -1, 0});
  const auto s = cosine_similarity_matrix(m);
  CHECK(s[1] == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
  CHECK(s[2] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s[3] == doctest::Approx(0.0).scale(1.0));

  m.append("z", std::vector<double>{0, 0, 0});
  try {
    cosine_similarity_matrix(m);
    FAIL("zero row accepted");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find('z') != std::string::npos);
  }
}

TEST_CASE("build_text_features: source selection") {
  std::vector<TokenizedDoc> docs{doc("a", {"sea"}), doc("b", {"bank"})};
  std::vector<std::optional<std::vector<double>>> none(2);
  const auto tf = build_text_features(docs, none);
  CHECK(tf.source == TextSource::Tfidf);
  CHECK(tf.vocabulary.size() == 2);

  std::vector<std::optional<std::vector<double>>> all{std::vector<double>{3, 4}, std::vector<double>{0, 2}};
  const auto ext = build_text_features(docs, all);
  CHECK(ext.source == TextSource::ExternalEmbedding);
  CHECK(ext.matrix.at(0, 0) == doctest::Approx(0.6));
  CHECK(ext.matrix.at(1, 1) == doctest::Approx(1.0));

  std::vector<std::optional<std::vector<double>>> mixed{std::vector<double>{3, 4}, std::nullopt};
  try {
    build_text_features(docs, mixed);
    FAIL("mixed sources accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Schema);
  }
}
