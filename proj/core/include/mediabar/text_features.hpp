#pragma once

#include <set>
#include <span>
#include <string>
#include <vector>

#include "mediabar/feature_matrix.hpp"
#include "mediabar/ingest.hpp"

namespace mediabar {

struct CompositeDoc {
  std::string video_id;
  std::string text;
};

struct TokenizedDoc {
  std::string video_id;
  std::vector<std::string> tokens;
};

enum class TextSource { ExternalEmbedding, Tfidf };

const char* to_string(TextSource s) noexcept;

struct TextFeatures {
  FeatureMatrix matrix;
  TextSource source = TextSource::Tfidf;
  std::vector<std::string> vocabulary;  // empty for external embeddings
};

using StopWords = std::set<std::string, std::less<>>;

/// title + "\n" + description + "\n" + transcript.
CompositeDoc composite_doc(const VideoEntry& entry, const std::string& transcript);

/// Splits on non-ASCII-letters, lowercases, keeps tokens of length >= 3 that
/// are not stop-words.
TokenizedDoc tokenize(const CompositeDoc& doc, const StopWords& stopwords);

/// Bundled English list.
const StopWords& default_stopwords();
StopWords load_stopwords(const std::filesystem::path& path);
StopWords parse_stopwords(const std::string& text);

struct TfidfResult {
  FeatureMatrix matrix;
  std::vector<std::string> vocabulary;
};

/// tf = count/len, idf = ln((1+N)/(1+df)) + 1, rows L2-normalized.
TfidfResult tfidf_matrix(std::span<const TokenizedDoc> docs);

/// Row-major N x N cosine similarities. Throws naming any zero-norm row.
std::vector<double> cosine_similarity_matrix(const FeatureMatrix& features);

/// External embeddings win when every video has one; mixing is an error.
/// `embeddings[i]` corresponds to docs[i].
TextFeatures build_text_features(std::span<const TokenizedDoc> docs,
                                 std::span<const std::optional<std::vector<double>>> embeddings);

}  // namespace mediabar
