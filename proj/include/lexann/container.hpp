#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lexann/embeddings.hpp"
#include "lexann/eval.hpp"
#include "lexann/inverted_index.hpp"
#include "lexann/kdtree.hpp"
#include "lexann/projection.hpp"

namespace lexann {

/// A self-contained search artifact: the encoder configuration, the
/// vocabulary and original vectors (needed to encode query words), and the
/// built index payload — an inverted index for the term encoders, or a
/// projection model plus reduced points for the k-d tree path. The k-d tree
/// itself is rebuilt on load; its results do not depend on tree shape.
///
/// One file, little-endian, JSON manifest with absolute section offsets
/// (layout documented in the README).
struct IndexContainer {
  EvalConfig config;
  std::uint64_t seed = 42;

  EmbeddingCorpus corpus;

  std::optional<InvertedIndex> index;        // fake-words / lexical-lsh
  std::optional<ProjectionModel> projection; // kdtree
  std::vector<std::vector<double>> reduced;  // kdtree
  std::optional<KdTree> tree;                // rebuilt on build/load

  void save(const std::string& path) const;
  static IndexContainer load(const std::string& path);

  /// Accepts either the container file itself or a directory holding
  /// `index.lexann` (the layout `index --out <dir>` produces).
  static std::string resolve_path(const std::string& dir_or_file);

  /// Retrieval used by the `search` subcommand. For term encoders the score
  /// is the tf-idf score; for the k-d tree it is the negated Euclidean
  /// distance in the reduced space (so that higher is always better).
  std::vector<ScoredDoc> search(const DenseVector& query, std::size_t depth,
                                std::optional<double> df_cutoff_override = std::nullopt,
                                bool rerank = false) const;
};

/// Builds the artifact for a corpus under the given configuration.
IndexContainer build_container(const EmbeddingCorpus& corpus, const EvalConfig& config,
                               std::uint64_t seed);

}  // namespace lexann
