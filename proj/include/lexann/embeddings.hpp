#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lexann/encoders.hpp"  // DenseVector
#include "lexann/inverted_index.hpp"  // DocId

namespace lexann {

enum class EmbeddingFormat {
  glove_text,     // one "word f1 ... fm" line per entry
  word2vec_text,  // "count dim" header, then the same body
};

EmbeddingFormat parse_embedding_format(std::string_view name);  // throws on unknown name
const char* embedding_format_name(EmbeddingFormat f);

/// An ordered word -> vector collection with a fixed dimension. Words are
/// unique; the doc id of a word is its position.
struct EmbeddingCorpus {
  std::size_t dim = 0;
  std::vector<std::string> words;
  std::vector<DenseVector> vectors;
  std::unordered_map<std::string, DocId> vocab;
  std::size_t duplicates_dropped = 0;
  EmbeddingFormat source_format = EmbeddingFormat::glove_text;

  std::size_t size() const noexcept { return words.size(); }
  std::optional<DocId> lookup(const std::string& word) const;

  /// Appends an entry. Dimension mismatches throw; a repeated word is
  /// dropped and counted in duplicates_dropped.
  void add(std::string word, DenseVector vector);
};

/// Loads a text-format embedding file. `limit` > 0 keeps only the first
/// `limit` entries. Errors (wrong dimension, bad float, short word2vec
/// body, empty file) throw ParseError naming the offending line.
EmbeddingCorpus load_embeddings(const std::string& path, EmbeddingFormat format,
                                std::size_t limit = 0);

/// Deterministic sample of `count` distinct in-vocabulary words; used as the
/// default query set. Results depend only on (corpus order, count, seed).
std::vector<std::string> sample_query_words(const EmbeddingCorpus& corpus,
                                            std::size_t count, std::uint64_t seed);

}  // namespace lexann
