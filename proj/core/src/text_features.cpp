#include "mediabar/text_features.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "mediabar/error.hpp"

namespace mediabar {

// Generated from data/stopwords_en.txt.
extern const char* const kBundledStopwords;

const char* to_string(TextSource s) noexcept {
  return s == TextSource::ExternalEmbedding ? "external_embedding" : "tfidf";
}

CompositeDoc composite_doc(const VideoEntry& entry, const std::string& transcript) {
  return {entry.id, entry.title + "\n" + entry.description + "\n" + transcript};
}

namespace {

bool ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

}  // namespace

TokenizedDoc tokenize(const CompositeDoc& doc, const StopWords& stopwords) {
  TokenizedDoc out{doc.video_id, {}};
  std::string current;
  auto flush = [&] {
    if (current.size() >= 3 && !stopwords.contains(current)) out.tokens.push_back(current);
    current.clear();
  };
  for (char c : doc.text) {
    if (ascii_alpha(c)) {
      current.push_back(static_cast<char>(c | 0x20));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

StopWords parse_stopwords(const std::string& text) {
  StopWords words;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    for (char& c : line) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c | 0x20);
    }
    words.insert(line);
  }
  return words;
}

const StopWords& default_stopwords() {
  static const StopWords words = parse_stopwords(kBundledStopwords);
  return words;
}

StopWords load_stopwords(const std::filesystem::path& path) { return parse_stopwords(read_text_file(path)); }

TfidfResult tfidf_matrix(std::span<const TokenizedDoc> docs) {
  if (docs.size() < 2) throw Error(ErrorKind::Precondition, "tfidf_matrix: need at least 2 documents");
  std::map<std::string, std::size_t> df;
  for (const TokenizedDoc& d : docs) {
    std::set<std::string_view> seen(d.tokens.begin(), d.tokens.end());
    for (std::string_view t : seen) ++df[std::string(t)];
  }
  if (df.empty()) throw Error(ErrorKind::Precondition, "tfidf_matrix: every document is empty");

  TfidfResult out;
  std::map<std::string_view, std::size_t> column;
  for (const auto& [token, count] : df) {
    column.emplace(token, out.vocabulary.size());
    out.vocabulary.push_back(token);
  }
  const std::size_t V = out.vocabulary.size();
  const double N = static_cast<double>(docs.size());
  std::vector<double> idf(V);
  for (const auto& [token, count] : df) {
    idf[column.at(token)] = std::log((1.0 + N) / (1.0 + static_cast<double>(count))) + 1.0;
  }

  out.matrix.dims = V;
  out.matrix.modality = Modality::Text;
  out.matrix.data.assign(docs.size() * V, 0.0);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    out.matrix.ids.push_back(docs[i].video_id);
    const auto& tokens = docs[i].tokens;
    if (tokens.empty()) continue;
    auto row = out.matrix.row(i);
    for (const std::string& t : tokens) row[column.at(t)] += 1.0;
    const double len = static_cast<double>(tokens.size());
    for (std::size_t c = 0; c < V; ++c) {
      if (row[c] != 0.0) row[c] = row[c] / len * idf[c];
    }
  }
  l2_normalize_rows(out.matrix);
  return out;
}

std::vector<double> cosine_similarity_matrix(const FeatureMatrix& features) {
  const std::size_t n = features.size();
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (double v : features.row(i)) s += v * v;
    if (s == 0.0) {
      throw Error(ErrorKind::Degenerate, "cosine similarity: zero-norm vector for '" + features.ids[i] + "'");
    }
    norms[i] = std::sqrt(s);
  }
  std::vector<double> sim(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    sim[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      double dot = 0.0;
      const auto a = features.row(i);
      const auto b = features.row(j);
      for (std::size_t d = 0; d < features.dims; ++d) dot += a[d] * b[d];
      const double c = dot / (norms[i] * norms[j]);
      sim[i * n + j] = sim[j * n + i] = c;
    }
  }
  return sim;
}

TextFeatures build_text_features(std::span<const TokenizedDoc> docs,
                                 std::span<const std::optional<std::vector<double>>> embeddings) {
  if (embeddings.size() != docs.size()) {
    throw Error(ErrorKind::Precondition, "build_text_features: one embedding slot per document required");
  }
  std::size_t with = 0;
  for (const auto& e : embeddings) with += e.has_value() ? 1 : 0;

  TextFeatures out;
  if (with == 0) {
    TfidfResult t = tfidf_matrix(docs);
    out.matrix = std::move(t.matrix);
    out.vocabulary = std::move(t.vocabulary);
    out.source = TextSource::Tfidf;
    return out;
  }
  if (with != docs.size()) {
    std::string missing;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      if (!embeddings[i]) missing += (missing.empty() ? "" : ", ") + docs[i].video_id;
    }
    throw Error(ErrorKind::Schema, "text features: embedding sidecars present for some videos but missing for: " +
                                       missing + " (sources cannot be mixed)");
  }
  out.source = TextSource::ExternalEmbedding;
  out.matrix.modality = Modality::Text;
  for (std::size_t i = 0; i < docs.size(); ++i) out.matrix.append(docs[i].video_id, *embeddings[i]);
  l2_normalize_rows(out.matrix);
  return out;
}

}  // namespace mediabar
