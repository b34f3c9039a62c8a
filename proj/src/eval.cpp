#include "lexann/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include "lexann/kdtree.hpp"

namespace lexann {

namespace {

double cosine(const DenseVector& a, const DenseVector& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a[i];
    const double y = b[i];
    dot += x * y;
    na += x * x;
    nb += y * y;
  }
  const double denom = std::sqrt(na) * std::sqrt(nb);
  return denom == 0.0 ? 0.0 : dot / denom;
}

}  // namespace

std::vector<DocId> brute_force_topk(const EmbeddingCorpus& corpus, const DenseVector& query,
                                    std::size_t k) {
  if (k > corpus.size()) {
    throw std::invalid_argument("brute_force_topk: k exceeds corpus size");
  }
  if (query.size() != corpus.dim) {
    throw std::invalid_argument("brute_force_topk: query dimension mismatch");
  }
  std::vector<std::pair<double, DocId>> scored(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    scored[i] = {cosine(query, corpus.vectors[i]), static_cast<DocId>(i)};
  }
  auto better = [](const std::pair<double, DocId>& a, const std::pair<double, DocId>& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  };
  std::partial_sort(scored.begin(), scored.begin() + k, scored.end(), better);
  std::vector<DocId> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = scored[i].second;
  return out;
}

double recall_at(const std::vector<DocId>& truth, const std::vector<DocId>& retrieved) {
  if (truth.empty()) {
    throw std::invalid_argument("recall_at: empty ground-truth list");
  }
  std::unordered_set<DocId> want(truth.begin(), truth.end());
  std::size_t hits = 0;
  for (DocId id : retrieved) {
    hits += want.erase(id);  // counts each truth id at most once
  }
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

EvalConfig::Method EvalConfig::parse_method(std::string_view name) {
  if (name == "fake-words") return Method::fake_words;
  if (name == "lexical-lsh") return Method::lexical_lsh;
  if (name == "kdtree") return Method::kdtree;
  if (name == "exact") return Method::exact;
  throw std::invalid_argument("unknown encoder '" + std::string(name) +
                              "' (expected fake-words, lexical-lsh, kdtree or exact)");
}

const char* EvalConfig::method_name(Method m) {
  switch (m) {
    case Method::fake_words: return "fake-words";
    case Method::lexical_lsh: return "lexical-lsh";
    case Method::kdtree: return "kdtree";
    case Method::exact: return "exact";
  }
  return "?";
}

std::string EvalConfig::label() const {
  switch (method) {
    case Method::fake_words: return "fake words";
    case Method::lexical_lsh: return "lexical LSH";
    case Method::kdtree: return "k-d tree";
    case Method::exact: return "exact";
  }
  return "?";
}

std::string EvalConfig::configuration() const {
  std::ostringstream os;
  switch (method) {
    case Method::fake_words:
      os << "q=" << fake_words.q;
      break;
    case Method::lexical_lsh:
      os << "b=" << lexical_lsh.num_buckets << ", h=" << lexical_lsh.num_hashes
         << ", n=" << lexical_lsh.ngram_len;
      break;
    case Method::kdtree:
      os << pipeline_name(pipeline) << ", p=" << reduced_dim;
      if (pipeline == ReductionPipeline::ppa_pca_ppa) os << ", D=" << ppa_d;
      break;
    case Method::exact:
      os << "brute force";
      break;
  }
  return os.str();
}

nlohmann::json EvalConfig::to_json() const {
  nlohmann::json j = {{"encoder", method_name(method)},
                      {"df_cutoff", df_cutoff},
                      {"rerank", rerank}};
  switch (method) {
    case Method::fake_words:
      j["q"] = fake_words.q;
      break;
    case Method::lexical_lsh:
      j["n"] = lexical_lsh.ngram_len;
      j["h"] = lexical_lsh.num_hashes;
      j["b"] = lexical_lsh.num_buckets;
      j["decimals"] = lexical_lsh.decimals;
      break;
    case Method::kdtree:
      j["pipeline"] = pipeline_name(pipeline);
      j["p"] = reduced_dim;
      j["ppa_d"] = ppa_d;
      break;
    case Method::exact:
      break;
  }
  return j;
}

EvalConfig EvalConfig::from_json(const nlohmann::json& j) {
  EvalConfig c;
  c.method = parse_method(j.value("encoder", "fake-words"));
  if (j.contains("q")) c.fake_words.q = j.at("q").get<std::uint32_t>();
  if (j.contains("n")) c.lexical_lsh.ngram_len = j.at("n").get<std::uint32_t>();
  if (j.contains("h")) c.lexical_lsh.num_hashes = j.at("h").get<std::uint32_t>();
  if (j.contains("b")) c.lexical_lsh.num_buckets = j.at("b").get<std::uint32_t>();
  if (j.contains("decimals")) c.lexical_lsh.decimals = j.at("decimals").get<std::uint32_t>();
  if (j.contains("pipeline")) c.pipeline = parse_pipeline(j.at("pipeline").get<std::string>());
  if (j.contains("p")) c.reduced_dim = j.at("p").get<std::uint32_t>();
  if (j.contains("ppa_d")) c.ppa_d = j.at("ppa_d").get<std::uint32_t>();
  if (j.contains("df_cutoff")) c.df_cutoff = j.at("df_cutoff").get<double>();
  if (j.contains("rerank")) c.rerank = j.at("rerank").get<bool>();
  return c;
}

namespace {

// A built retrieval system: one of the term-based indexes, the reduced
// kd-tree, or the exact baseline.
struct Retriever {
  const EmbeddingCorpus* corpus = nullptr;
  EvalConfig config;

  std::optional<InvertedIndex> index;
  std::optional<ProjectionModel> model;
  std::optional<KdTree> tree;

  std::uint64_t index_size() const {
    switch (config.method) {
      case EvalConfig::Method::fake_words:
      case EvalConfig::Method::lexical_lsh:
        return index->index_size_bytes();
      case EvalConfig::Method::kdtree:
        // reduced points + fitted model, as persisted in the container
        return static_cast<std::uint64_t>(corpus->size()) * config.reduced_dim * sizeof(double) +
               model->size_bytes();
      case EvalConfig::Method::exact:
        return static_cast<std::uint64_t>(corpus->size()) * corpus->dim * sizeof(float);
    }
    return 0;
  }

  std::vector<DocId> retrieve(const DenseVector& query, std::size_t depth) const {
    std::vector<DocId> out;
    switch (config.method) {
      case EvalConfig::Method::fake_words: {
        const TermBag bag = encode_fake_words(normalize(query), config.fake_words);
        for (const ScoredDoc& s : index->search(bag, depth, config.df_cutoff)) {
          out.push_back(s.doc_id);
        }
        break;
      }
      case EvalConfig::Method::lexical_lsh: {
        const TermBag bag = encode_lexical_lsh(query, config.lexical_lsh);
        for (const ScoredDoc& s : index->search(bag, depth, config.df_cutoff)) {
          out.push_back(s.doc_id);
        }
        break;
      }
      case EvalConfig::Method::kdtree: {
        for (const KdTree::Neighbor& n : tree->knn(model->transform(query), depth)) {
          out.push_back(n.doc_id);
        }
        break;
      }
      case EvalConfig::Method::exact: {
        out = brute_force_topk(*corpus, query, std::min(depth, corpus->size()));
        break;
      }
    }
    if (config.rerank) {
      // Optional refinement: reorder the retrieved depth-d set by exact
      // cosine against the original vectors. The membership of the set (and
      // hence R at the full depth) is unchanged.
      std::vector<std::pair<double, DocId>> scored;
      scored.reserve(out.size());
      for (DocId id : out) scored.emplace_back(cosine(query, corpus->vectors[id]), id);
      std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
      });
      for (std::size_t i = 0; i < scored.size(); ++i) out[i] = scored[i].second;
    }
    return out;
  }
};

Retriever build_retriever(const EmbeddingCorpus& corpus, const EvalConfig& config) {
  Retriever r;
  r.corpus = &corpus;
  r.config = config;
  switch (config.method) {
    case EvalConfig::Method::fake_words: {
      InvertedIndex idx;
      for (std::size_t i = 0; i < corpus.size(); ++i) {
        idx.add_document(TermDocument{static_cast<DocId>(i),
                                      encode_fake_words(normalize(corpus.vectors[i]),
                                                        config.fake_words)});
      }
      r.index = std::move(idx);
      break;
    }
    case EvalConfig::Method::lexical_lsh: {
      InvertedIndex idx;
      for (std::size_t i = 0; i < corpus.size(); ++i) {
        idx.add_document(TermDocument{static_cast<DocId>(i),
                                      encode_lexical_lsh(corpus.vectors[i],
                                                         config.lexical_lsh)});
      }
      r.index = std::move(idx);
      break;
    }
    case EvalConfig::Method::kdtree: {
      auto [model, reduced] = reduce(corpus.vectors, config.pipeline, config.reduced_dim,
                                     config.ppa_d);
      r.model = std::move(model);
      r.tree = KdTree::build(reduced);
      break;
    }
    case EvalConfig::Method::exact:
      break;
  }
  return r;
}

}  // namespace

RecallReport run_eval(const EmbeddingCorpus& corpus, const std::vector<std::string>& query_words,
                      const EvalConfig& config, std::size_t k, std::vector<std::size_t> depths,
                      const EvalOptions& options) {
  if (k < 1 || k > corpus.size()) {
    throw std::invalid_argument("run_eval: k must be in [1, corpus size]");
  }
  if (depths.empty()) {
    throw std::invalid_argument("run_eval: need at least one retrieval depth");
  }
  std::sort(depths.begin(), depths.end());
  const std::size_t max_depth = depths.back();

  std::vector<DocId> query_ids;
  std::size_t skipped = 0;
  for (const auto& word : query_words) {
    if (auto id = corpus.lookup(word)) {
      query_ids.push_back(*id);
    } else {
      ++skipped;
    }
  }
  if (query_ids.empty()) {
    throw std::invalid_argument("run_eval: no query word is present in the corpus");
  }

  const Retriever retriever = build_retriever(corpus, config);

  struct PerQuery {
    std::map<std::size_t, double> recall;
    double latency_ms = 0.0;
  };
  std::vector<PerQuery> results(query_ids.size());

  auto eval_one = [&](std::size_t qi, bool timed) {
    const DenseVector& qvec = corpus.vectors[query_ids[qi]];

    std::vector<DocId> truth;
    if (options.include_self_match) {
      truth = brute_force_topk(corpus, qvec, k);
    } else {
      truth = brute_force_topk(corpus, qvec, std::min(k + 1, corpus.size()));
      truth.erase(std::remove(truth.begin(), truth.end(), query_ids[qi]), truth.end());
      truth.resize(std::min(truth.size(), k));
    }

    const auto start = std::chrono::steady_clock::now();
    const std::vector<DocId> retrieved = retriever.retrieve(qvec, max_depth);
    const auto stop = std::chrono::steady_clock::now();
    if (timed) {
      results[qi].latency_ms =
          std::chrono::duration<double, std::milli>(stop - start).count();
    }

    for (std::size_t d : depths) {
      const std::size_t take = std::min(d, retrieved.size());
      results[qi].recall[d] =
          recall_at(truth, std::vector<DocId>(retrieved.begin(), retrieved.begin() + take));
    }
  };

  if (options.parallel) {
    const std::size_t workers =
        std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()),
                              query_ids.size());
    std::vector<std::future<void>> futures;
    futures.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      futures.push_back(std::async(std::launch::async, [&, w]() {
        for (std::size_t qi = w; qi < query_ids.size(); qi += workers) {
          eval_one(qi, false);
        }
      }));
    }
    for (auto& f : futures) f.get();
  } else {
    for (std::size_t qi = 0; qi < query_ids.size(); ++qi) eval_one(qi, true);
  }

  EvalRow row;
  row.config = config;
  row.num_queries = query_ids.size();
  row.skipped_queries = skipped;
  row.index_size_bytes = retriever.index_size();
  for (std::size_t d : depths) {
    double sum = 0.0;
    for (const auto& r : results) sum += r.recall.at(d);
    row.recall[d] = sum / static_cast<double>(results.size());
  }
  if (options.parallel) {
    row.mean_latency_ms = std::numeric_limits<double>::quiet_NaN();
    row.p95_latency_ms = std::numeric_limits<double>::quiet_NaN();
  } else {
    std::vector<double> lat(results.size());
    for (std::size_t i = 0; i < results.size(); ++i) lat[i] = results[i].latency_ms;
    double sum = 0.0;
    for (double v : lat) sum += v;
    row.mean_latency_ms = sum / static_cast<double>(lat.size());
    std::sort(lat.begin(), lat.end());
    auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(lat.size())));
    if (rank > 0) --rank;  // 1-based rank -> index
    row.p95_latency_ms = lat[std::min(rank, lat.size() - 1)];
  }

  RecallReport report;
  report.k = k;
  report.depths = depths;
  report.rows.push_back(std::move(row));
  return report;
}

RecallReport run_eval_grid(const EmbeddingCorpus& corpus,
                           const std::vector<std::string>& query_words,
                           const std::vector<EvalConfig>& configs, std::size_t k,
                           const std::vector<std::size_t>& depths,
                           const EvalOptions& options) {
  if (configs.empty()) {
    throw std::invalid_argument("run_eval_grid: empty configuration list");
  }
  RecallReport merged;
  for (const EvalConfig& c : configs) {
    RecallReport one = run_eval(corpus, query_words, c, k, depths, options);
    if (merged.rows.empty()) {
      merged.k = one.k;
      merged.depths = one.depths;
    }
    merged.rows.push_back(std::move(one.rows[0]));
  }
  return merged;
}

nlohmann::json RecallReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const EvalRow& row : rows) {
    nlohmann::json recall = nlohmann::json::object();
    for (const auto& [d, r] : row.recall) recall[std::to_string(d)] = r;
    nlohmann::json j = {
        {"model", row.config.label()},
        {"configuration", row.config.configuration()},
        {"config", row.config.to_json()},
        {"recall", recall},
        {"index_size_bytes", row.index_size_bytes},
        {"num_queries", row.num_queries},
        {"skipped_queries", row.skipped_queries},
    };
    if (std::isnan(row.mean_latency_ms)) {
      j["mean_latency_ms"] = nullptr;
      j["p95_latency_ms"] = nullptr;
    } else {
      j["mean_latency_ms"] = row.mean_latency_ms;
      j["p95_latency_ms"] = row.p95_latency_ms;
    }
    rows_json.push_back(std::move(j));
  }
  return nlohmann::json{{"k", k},
                        {"depths", depths},
                        {"rows", std::move(rows_json)}};
}

namespace {

std::string human_bytes(std::uint64_t bytes) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(1);
  if (bytes >= 1024ull * 1024ull * 1024ull) {
    os << static_cast<double>(bytes) / (1024.0 * 1024.0 * 1024.0) << "GB";
  } else if (bytes >= 1024ull * 1024ull) {
    os << static_cast<double>(bytes) / (1024.0 * 1024.0) << "MB";
  } else if (bytes >= 1024ull) {
    os << static_cast<double>(bytes) / 1024.0 << "KB";
  } else {
    os << bytes << "B";
  }
  return os.str();
}

}  // namespace

std::string RecallReport::to_table() const {
  std::ostringstream os;
  std::vector<std::vector<std::string>> cells;

  std::vector<std::string> header = {"model", "configuration"};
  for (std::size_t d : depths) header.push_back("d=" + std::to_string(d));
  header.push_back("latency");
  header.push_back("index size");
  cells.push_back(std::move(header));

  for (const EvalRow& row : rows) {
    std::vector<std::string> line = {row.config.label(), row.config.configuration()};
    for (std::size_t d : depths) {
      std::ostringstream v;
      v << std::fixed << std::setprecision(3) << row.recall.at(d);
      line.push_back(v.str());
    }
    if (std::isnan(row.mean_latency_ms)) {
      line.push_back("-");
    } else {
      std::ostringstream v;
      v << std::fixed << std::setprecision(1) << row.mean_latency_ms << "ms";
      line.push_back(v.str());
    }
    line.push_back(human_bytes(row.index_size_bytes));
    cells.push_back(std::move(line));
  }

  std::vector<std::size_t> widths(cells[0].size(), 0);
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      widths[c] = std::max(widths[c], line[c].size());
    }
  }
  os << "R@(" << k << ",d)\n";
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      os << std::left << std::setw(static_cast<int>(widths[c]) + 2) << line[c];
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace lexann
