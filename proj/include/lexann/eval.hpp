#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lexann/embeddings.hpp"
#include "lexann/encoders.hpp"
#include "lexann/projection.hpp"

namespace lexann {

/// Exact top-k by cosine similarity on the original vectors, descending,
/// ties broken by ascending doc id. The ground truth of every recall run.
/// The query's own vector is not excluded. Throws when k > corpus size.
std::vector<DocId> brute_force_topk(const EmbeddingCorpus& corpus, const DenseVector& query,
                                    std::size_t k);

/// R@(k, d): |truth ∩ retrieved| / |truth|. Pure set semantics; the order
/// of `retrieved` is irrelevant.
double recall_at(const std::vector<DocId>& truth, const std::vector<DocId>& retrieved);

/// One retrieval system to evaluate: an encoder (or the exact baseline) plus
/// its parameters. JSON keys follow the config-file surface:
/// encoder, q, n, h, b, decimals, pipeline, p, ppa_d, df_cutoff, rerank.
struct EvalConfig {
  enum class Method { fake_words, lexical_lsh, kdtree, exact };

  Method method = Method::fake_words;
  FakeWordsConfig fake_words;
  LexicalLshConfig lexical_lsh;
  ReductionPipeline pipeline = ReductionPipeline::pca;
  std::uint32_t reduced_dim = 8;  // p
  std::uint32_t ppa_d = 7;        // D, sized for ~300-dim inputs
  double df_cutoff = 1.0;
  bool rerank = false;  // optional exact-similarity reordering of the top d

  static Method parse_method(std::string_view name);
  static const char* method_name(Method m);

  std::string label() const;          // table column 1, e.g. "fake words"
  std::string configuration() const;  // table column 2, e.g. "q=50"

  nlohmann::json to_json() const;
  static EvalConfig from_json(const nlohmann::json& j);
};

struct EvalOptions {
  bool parallel = false;          // recall only; latency is suppressed
  bool include_self_match = true; // keep the query's own vector in the truth
};

struct EvalRow {
  EvalConfig config;
  std::map<std::size_t, double> recall;  // depth -> mean R@(k, depth)
  double mean_latency_ms = 0.0;          // NaN when latency is suppressed
  double p95_latency_ms = 0.0;
  std::uint64_t index_size_bytes = 0;
  std::size_t num_queries = 0;
  std::size_t skipped_queries = 0;
};

/// Table-1-style result set: one row per evaluated configuration.
struct RecallReport {
  std::size_t k = 0;
  std::vector<std::size_t> depths;
  std::vector<EvalRow> rows;

  nlohmann::json to_json() const;
  std::string to_table() const;
};

/// Evaluates one configuration: builds its index once, retrieves every query
/// at max(depths) under a monotonic clock, and reads R@(k, d) off the
/// prefixes of that single result list. Query words missing from the corpus
/// are skipped and counted; an empty query set after filtering throws.
RecallReport run_eval(const EmbeddingCorpus& corpus, const std::vector<std::string>& query_words,
                      const EvalConfig& config, std::size_t k, std::vector<std::size_t> depths,
                      const EvalOptions& options = {});

/// run_eval over a list of configurations, merged into one report.
RecallReport run_eval_grid(const EmbeddingCorpus& corpus,
                           const std::vector<std::string>& query_words,
                           const std::vector<EvalConfig>& configs, std::size_t k,
                           const std::vector<std::size_t>& depths,
                           const EvalOptions& options = {});

}  // namespace lexann
