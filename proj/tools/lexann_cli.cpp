// lexann command-line interface: index / search / eval over text-format
// word embeddings.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lexann/container.hpp"
#include "lexann/embeddings.hpp"
#include "lexann/errors.hpp"
#include "lexann/eval.hpp"

namespace {

using nlohmann::json;

struct CommonOpts {
  std::uint64_t seed = 42;
};

struct EncoderOpts {
  std::string config_file;
  std::string encoder;
  std::uint32_t q = 0;
  std::uint32_t n = 0;
  std::uint32_t h = 0;
  std::uint32_t b = 0;
  std::uint32_t decimals = 0;
  std::string pipeline;
  std::uint32_t p = 0;
  std::uint32_t ppa_d = 0;
  double df_cutoff = -1.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_file, "JSON config file (flags take precedence)");
    cmd->add_option("--encoder", encoder, "fake-words | lexical-lsh | kdtree | exact");
    cmd->add_option("--q", q, "fake-words quantization factor");
    cmd->add_option("--n", n, "lexical-lsh n-gram length");
    cmd->add_option("--h", h, "lexical-lsh hash count");
    cmd->add_option("--b", b, "lexical-lsh bucket count");
    cmd->add_option("--decimals", decimals, "lexical-lsh quantization places");
    cmd->add_option("--pipeline", pipeline, "kdtree reduction: pca | ppa-pca-ppa");
    cmd->add_option("--p", p, "kdtree reduced dimensionality (1-8)");
    cmd->add_option("--ppa-d", ppa_d, "kdtree PPA removal depth");
    cmd->add_option("--df-cutoff", df_cutoff,
                    "drop query terms with df > cutoff * N (fraction in (0,1])");
  }

  // Precedence: flags > config file > defaults.
  lexann::EvalConfig resolve(const CLI::App* cmd) const {
    json merged = json::object();
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      if (!in) {
        throw lexann::Error("cannot open config file '" + config_file + "'");
      }
      merged = json::parse(in);
    }
    auto set_if = [&](const char* flag, const char* key, auto value) {
      if (cmd->count(flag) > 0) merged[key] = value;
    };
    set_if("--encoder", "encoder", encoder);
    set_if("--q", "q", q);
    set_if("--n", "n", n);
    set_if("--h", "h", h);
    set_if("--b", "b", b);
    set_if("--decimals", "decimals", decimals);
    set_if("--pipeline", "pipeline", pipeline);
    set_if("--p", "p", p);
    set_if("--ppa-d", "ppa_d", ppa_d);
    set_if("--df-cutoff", "df_cutoff", df_cutoff);
    return lexann::EvalConfig::from_json(merged);
  }
};

struct InputOpts {
  std::string path;
  std::string format = "glove-text";
  std::size_t limit = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--input", path, "embedding file")->required();
    cmd->add_option("--format", format, "glove-text | word2vec-text");
    cmd->add_option("--limit", limit, "keep only the first N entries (0 = all)");
  }

  lexann::EmbeddingCorpus load() const {
    return lexann::load_embeddings(path, lexann::parse_embedding_format(format), limit);
  }
};

lexann::DenseVector parse_vector_literal(const std::string& text) {
  lexann::DenseVector out;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) {
    if (field.empty()) continue;
    out.push_back(std::stof(field));
  }
  if (out.empty()) {
    throw lexann::Error("--vector expects a comma-separated float list");
  }
  return out;
}

int cmd_index(const CommonOpts& common, const InputOpts& input, const EncoderOpts& enc,
              const CLI::App* cmd, const std::string& out_path) {
  const lexann::EvalConfig config = enc.resolve(cmd);
  const lexann::EmbeddingCorpus corpus = input.load();
  if (corpus.duplicates_dropped > 0) {
    std::cerr << "warning: dropped " << corpus.duplicates_dropped << " duplicate words\n";
  }

  const lexann::IndexContainer container = lexann::build_container(corpus, config, common.seed);

  namespace fs = std::filesystem;
  fs::path target(out_path);
  if (!target.has_extension() || fs::is_directory(target)) {
    fs::create_directories(target);
    target /= "index.lexann";
  } else if (target.has_parent_path()) {
    fs::create_directories(target.parent_path());
  }
  container.save(target.string());

  std::cout << "indexed " << corpus.size() << " vectors (dim " << corpus.dim << ", encoder "
            << lexann::EvalConfig::method_name(config.method) << ") -> " << target.string()
            << " (" << fs::file_size(target) << " bytes)\n";
  return 0;
}

int cmd_search(const std::string& index_path, const std::string& word,
               const std::string& vector_literal, std::size_t depth,
               std::optional<double> df_cutoff, bool rerank) {
  const lexann::IndexContainer container =
      lexann::IndexContainer::load(lexann::IndexContainer::resolve_path(index_path));

  lexann::DenseVector query;
  if (!word.empty()) {
    const auto id = container.corpus.lookup(word);
    if (!id) {
      throw lexann::Error("word '" + word + "' is not in the indexed vocabulary");
    }
    query = container.corpus.vectors[*id];
  } else {
    query = parse_vector_literal(vector_literal);
  }

  const auto results = container.search(query, depth, df_cutoff, rerank);
  const bool distance_scored =
      container.config.method == lexann::EvalConfig::Method::kdtree && !rerank;
  std::cout << std::left << std::setw(6) << "rank" << std::setw(10) << "doc_id"
            << std::setw(24) << "word" << (distance_scored ? "distance" : "score") << '\n';
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    const double value = distance_scored ? -r.score : r.score;
    std::cout << std::left << std::setw(6) << (i + 1) << std::setw(10) << r.doc_id
              << std::setw(24) << container.corpus.words[r.doc_id] << std::setprecision(6)
              << std::fixed << value << '\n';
  }
  return 0;
}

int cmd_eval(const CommonOpts& common, const InputOpts& input, const EncoderOpts& enc,
             const CLI::App* cmd, const std::string& grid_file, std::size_t k,
             const std::string& depths_csv, std::size_t num_queries,
             const std::string& queries_file, const std::string& report_path, bool parallel,
             bool exclude_self) {
  const lexann::EmbeddingCorpus corpus = input.load();

  std::vector<lexann::EvalConfig> configs;
  if (!grid_file.empty()) {
    std::ifstream in(grid_file);
    if (!in) {
      throw lexann::Error("cannot open grid file '" + grid_file + "'");
    }
    const json grid = json::parse(in);
    const json defaults = grid.value("defaults", json::object());
    if (!grid.contains("configs") || !grid["configs"].is_array() || grid["configs"].empty()) {
      throw lexann::Error("grid file needs a nonempty 'configs' array");
    }
    for (const auto& entry : grid["configs"]) {
      json merged = defaults;
      merged.update(entry);
      configs.push_back(lexann::EvalConfig::from_json(merged));
    }
  } else {
    configs.push_back(enc.resolve(cmd));
  }

  std::vector<std::string> queries;
  if (!queries_file.empty()) {
    std::ifstream in(queries_file);
    if (!in) {
      throw lexann::Error("cannot open queries file '" + queries_file + "'");
    }
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) queries.push_back(line);
    }
  } else {
    queries = lexann::sample_query_words(corpus, num_queries, common.seed);
  }

  std::vector<std::size_t> depths;
  {
    std::stringstream ss(depths_csv);
    std::string field;
    while (std::getline(ss, field, ',')) {
      if (!field.empty()) depths.push_back(std::stoul(field));
    }
  }
  if (depths.empty()) {
    throw lexann::Error("--depths expects a comma-separated list, e.g. 10,20,50,100");
  }

  lexann::EvalOptions options;
  options.parallel = parallel;
  options.include_self_match = !exclude_self;

  const lexann::RecallReport report =
      lexann::run_eval_grid(corpus, queries, configs, k, depths, options);

  std::cout << report.to_table();
  if (report.rows[0].skipped_queries > 0) {
    std::cerr << "warning: " << report.rows[0].skipped_queries
              << " query words were not in the corpus\n";
  }
  if (!report_path.empty()) {
    json doc = report.to_json();
    doc["seed"] = common.seed;
    doc["corpus"] = {{"path", input.path},
                     {"format", input.format},
                     {"limit", input.limit},
                     {"size", corpus.size()},
                     {"dim", corpus.dim}};
    std::ofstream out(report_path);
    if (!out) {
      throw lexann::Error("cannot open report file '" + report_path + "'");
    }
    out << doc.dump(2) << '\n';
    std::cout << "report written to " << report_path << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"approximate nearest-neighbor search on dense vectors with an inverted index"};
  app.require_subcommand(1);
  // --h is the lexical-lsh hash count, so help gets no short flag.
  app.set_help_flag("--help", "print this help message and exit");

  CommonOpts common;
  app.add_option("--seed", common.seed, "seed for query sampling and other randomness");

  // index
  auto* index_cmd = app.add_subcommand("index", "build and persist a search index");
  index_cmd->set_help_flag("--help", "print this help message and exit");
  InputOpts index_input;
  EncoderOpts index_enc;
  std::string out_path;
  index_input.attach(index_cmd);
  index_enc.attach(index_cmd);
  index_cmd->add_option("--out", out_path, "output directory or file")->required();

  // search
  auto* search_cmd = app.add_subcommand("search", "query a persisted index");
  search_cmd->set_help_flag("--help", "print this help message and exit");
  std::string index_path, query_word, query_vector;
  std::size_t depth = 10;
  double search_cutoff = -1.0;
  bool search_rerank = false;
  search_cmd->add_option("--index", index_path, "index directory or file")->required();
  search_cmd->add_option("--word", query_word, "query by vocabulary word");
  search_cmd->add_option("--vector", query_vector, "query by raw vector: comma-separated floats");
  search_cmd->add_option("--d", depth, "retrieval depth");
  search_cmd->add_option("--df-cutoff", search_cutoff, "override the indexed df cutoff");
  search_cmd->add_flag("--rerank", search_rerank,
                       "re-order the top d by exact cosine before printing");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "run the recall/latency evaluation");
  eval_cmd->set_help_flag("--help", "print this help message and exit");
  InputOpts eval_input;
  EncoderOpts eval_enc;
  std::string grid_file, depths_csv = "10,20,50,100", queries_file, report_path;
  std::size_t k = 10, num_queries = 100;
  bool parallel = false, exclude_self = false;
  eval_input.attach(eval_cmd);
  eval_enc.attach(eval_cmd);
  eval_cmd->add_option("--grid", grid_file, "JSON parameter grid (one report row per config)");
  eval_cmd->add_option("--k", k, "ground-truth depth k");
  eval_cmd->add_option("--depths", depths_csv, "retrieval depths, comma-separated");
  eval_cmd->add_option("--num-queries", num_queries, "sampled query count (seeded)");
  eval_cmd->add_option("--queries", queries_file, "file with one query word per line");
  eval_cmd->add_option("--out", report_path, "write the JSON report here");
  eval_cmd->add_flag("--parallel", parallel, "parallel recall computation (latency suppressed)");
  eval_cmd->add_flag("--exclude-self", exclude_self,
                     "drop the query word itself from the ground truth");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (index_cmd->parsed()) {
      return cmd_index(common, index_input, index_enc, index_cmd, out_path);
    }
    if (search_cmd->parsed()) {
      if (query_word.empty() == query_vector.empty()) {
        std::cerr << "error: search needs exactly one of --word or --vector\n";
        return 2;
      }
      std::optional<double> cutoff;
      if (search_cmd->count("--df-cutoff") > 0) cutoff = search_cutoff;
      return cmd_search(index_path, query_word, query_vector, depth, cutoff, search_rerank);
    }
    if (eval_cmd->parsed()) {
      return cmd_eval(common, eval_input, eval_enc, eval_cmd, grid_file, k, depths_csv,
                      num_queries, queries_file, report_path, parallel, exclude_self);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
