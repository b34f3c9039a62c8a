#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace lexann {

using DocId = std::uint32_t;

/// A bag (multiset) of terms: term -> occurrence count, every count >= 1.
using TermBag = std::unordered_map<std::string, std::uint32_t>;

struct TermDocument {
  DocId doc_id = 0;
  TermBag terms;
};

struct Posting {
  DocId doc_id = 0;
  std::uint32_t freq = 0;
};

struct ScoredDoc {
  DocId doc_id = 0;
  double score = 0.0;
};

/// Minimal in-memory inverted index with tf-idf ranked retrieval.
///
/// Scoring keeps the rank-relevant parts of the classic Lucene formula
/// (no query norm, no coordination factor):
///
///   score(q, d) = norm(d) * sum_t qf(t) * sqrt(freq(t, d)) * idf(t)^2
///   idf(t)      = 1 + ln(N / (df(t) + 1))
///   norm(d)     = 1 / sqrt(doc_len(d))
///
/// Query terms are processed in lexicographic order so that scores come out
/// bit-identical between search() and tf_idf_score() and across runs.
///
/// Construction is single-writer; a fully built index is safe for
/// concurrent search() calls.
class InvertedIndex {
public:
  /// Rejects duplicate doc ids (DuplicateDocIdError) and zero frequencies.
  /// An empty term bag is allowed: the document counts toward N but can
  /// never be retrieved.
  void add_document(const TermDocument& doc);

  std::size_t num_documents() const noexcept { return doc_len_.size(); }
  std::size_t num_terms() const noexcept { return postings_.size(); }
  bool contains(DocId doc_id) const { return doc_len_.count(doc_id) != 0; }

  /// Number of documents containing the term; 0 for unknown terms.
  std::uint32_t doc_frequency(const std::string& term) const;

  /// Total term occurrences in the document. Throws on unknown doc id.
  std::uint64_t doc_length(DocId doc_id) const;

  /// Postings list (ascending doc_id), or nullptr for an unknown term.
  const std::vector<Posting>* postings(const std::string& term) const;

  /// All indexed terms, lexicographically sorted.
  std::vector<std::string> terms() const;

  double idf(const std::string& term) const;

  /// Full-formula score of one document against a query bag. Query terms
  /// absent from the index contribute 0. Throws on unknown doc id.
  double tf_idf_score(const TermBag& query, DocId doc_id) const;

  /// Ranked retrieval. Query terms with df(t) > df_cutoff * N are dropped
  /// before scoring. Only documents containing at least one surviving term
  /// are scored; the top `depth` are returned, score descending, ties broken
  /// by ascending doc_id. All terms filtered or unknown -> empty result.
  std::vector<ScoredDoc> search(const TermBag& query, std::size_t depth,
                                double df_cutoff = 1.0) const;

  // Persistence: little-endian binary with a JSON header (format documented
  // in the README). load(persist(x)) is observationally identical to x.
  void save(std::ostream& out) const;
  void persist(const std::string& path) const;
  static InvertedIndex load(std::istream& in);
  static InvertedIndex load_file(const std::string& path);

  /// Exact size of the persisted form, in bytes.
  std::uint64_t index_size_bytes() const;

  /// Free-form metadata stored in the file header (vector dimension,
  /// encoder parameters, ...). Round-trips through persist/load.
  nlohmann::json metadata = nlohmann::json::object();

private:
  std::unordered_map<std::string, std::vector<Posting>> postings_;
  std::unordered_map<DocId, std::uint64_t> doc_len_;
};

}  // namespace lexann
