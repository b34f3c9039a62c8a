#include "lexann/container.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lexann/binio.hpp"
#include "lexann/errors.hpp"

namespace lexann {

namespace {

constexpr char kMagic[8] = {'L', 'E', 'X', 'A', 'N', 'N', 'A', 'R'};
constexpr std::uint32_t kFormatVersion = 1;

std::string vocab_blob(const EmbeddingCorpus& corpus) {
  std::ostringstream os(std::ios::binary);
  binio::Writer w(os);
  w.u32(static_cast<std::uint32_t>(corpus.size()));
  for (const auto& word : corpus.words) w.str(word);
  return os.str();
}

std::string vectors_blob(const EmbeddingCorpus& corpus) {
  std::ostringstream os(std::ios::binary);
  binio::Writer w(os);
  w.u32(static_cast<std::uint32_t>(corpus.size()));
  w.u32(static_cast<std::uint32_t>(corpus.dim));
  for (const auto& vec : corpus.vectors) {
    for (float x : vec) w.f32(x);
  }
  return os.str();
}

std::string points_blob(const std::vector<std::vector<double>>& points) {
  std::ostringstream os(std::ios::binary);
  binio::Writer w(os);
  w.u32(static_cast<std::uint32_t>(points.size()));
  w.u32(points.empty() ? 0u : static_cast<std::uint32_t>(points[0].size()));
  for (const auto& row : points) {
    for (double x : row) w.f64(x);
  }
  return os.str();
}

double cosine(const DenseVector& a, const DenseVector& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  const double denom = std::sqrt(na) * std::sqrt(nb);
  return denom == 0.0 ? 0.0 : dot / denom;
}

}  // namespace

void IndexContainer::save(const std::string& path) const {
  std::vector<std::pair<std::string, std::string>> sections;
  sections.emplace_back("vocab", vocab_blob(corpus));
  sections.emplace_back("vectors", vectors_blob(corpus));
  if (index) {
    std::ostringstream os(std::ios::binary);
    index->save(os);
    sections.emplace_back("invindex", os.str());
  }
  if (projection) {
    std::ostringstream os(std::ios::binary);
    projection->save(os);
    sections.emplace_back("projection", os.str());
    sections.emplace_back("points", points_blob(reduced));
  }

  // Two passes: the manifest length shifts the section offsets, so build it
  // with placeholders first and patch the offsets in.
  nlohmann::json manifest = {
      {"version", kFormatVersion},
      {"seed", seed},
      {"config", config.to_json()},
      {"dim", corpus.dim},
      {"count", corpus.size()},
      {"format", embedding_format_name(corpus.source_format)},
  };
  nlohmann::json section_list = nlohmann::json::array();
  for (const auto& [name, blob] : sections) {
    section_list.push_back({{"name", name}, {"offset", 0}, {"size", blob.size()}});
  }
  manifest["sections"] = section_list;

  std::string manifest_text = manifest.dump();
  const std::size_t manifest_len = manifest_text.size();
  std::size_t offset = sizeof(kMagic) + 4 + manifest_len;
  for (std::size_t i = 0; i < sections.size(); ++i) {
    manifest["sections"][i]["offset"] = offset;
    offset += sections[i].second.size();
  }
  manifest_text = manifest.dump();
  if (manifest_text.size() != manifest_len) {
    // Offset digits changed the manifest length; redo with the final length.
    std::size_t off2 = sizeof(kMagic) + 4 + manifest_text.size();
    for (std::size_t i = 0; i < sections.size(); ++i) {
      manifest["sections"][i]["offset"] = off2;
      off2 += sections[i].second.size();
    }
    manifest_text = manifest.dump();
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot open '" + path + "' for writing");
  }
  binio::Writer w(out);
  w.bytes(kMagic, sizeof(kMagic));
  w.str(manifest_text);
  for (const auto& [name, blob] : sections) {
    w.bytes(blob.data(), blob.size());
  }
  out.flush();
  if (!out) {
    throw Error("write to '" + path + "' failed");
  }
}

std::string IndexContainer::resolve_path(const std::string& dir_or_file) {
  namespace fs = std::filesystem;
  fs::path p(dir_or_file);
  if (fs::is_directory(p)) {
    return (p / "index.lexann").string();
  }
  return p.string();
}

IndexContainer IndexContainer::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open '" + path + "' for reading");
  }
  binio::Reader r(in);
  char magic[8];
  r.bytes(magic, sizeof(magic), "magic");
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ParseError("bad magic: not a lexann index container", 0);
  }
  const std::size_t manifest_at = r.offset();
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(r.str("manifest"));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad JSON manifest: ") + e.what(), manifest_at);
  }
  if (manifest.value("version", 0u) != kFormatVersion) {
    throw ParseError("unsupported container version", manifest_at);
  }

  IndexContainer c;
  c.seed = manifest.value("seed", 42ull);
  c.config = EvalConfig::from_json(manifest.at("config"));
  c.corpus.dim = manifest.at("dim").get<std::size_t>();
  c.corpus.source_format = parse_embedding_format(manifest.at("format").get<std::string>());

  auto seek_section = [&](const std::string& name) -> std::optional<std::size_t> {
    for (const auto& s : manifest.at("sections")) {
      if (s.at("name").get<std::string>() == name) {
        return s.at("offset").get<std::size_t>();
      }
    }
    return std::nullopt;
  };
  auto open_at = [&](std::size_t offset) {
    in.clear();
    in.seekg(static_cast<std::streamoff>(offset));
    if (!in) {
      throw ParseError("cannot seek to section offset " + std::to_string(offset), offset);
    }
  };

  {
    const auto off = seek_section("vocab");
    if (!off) throw ParseError("container is missing the vocab section", manifest_at);
    open_at(*off);
    binio::Reader vr(in, *off);
    const std::uint32_t count = vr.u32("vocab count");
    std::vector<std::string> words(count);
    for (auto& w : words) w = vr.str("vocab word");

    const auto voff = seek_section("vectors");
    if (!voff) throw ParseError("container is missing the vectors section", manifest_at);
    open_at(*voff);
    binio::Reader xr(in, *voff);
    const std::uint32_t vcount = xr.u32("vector count");
    const std::uint32_t dim = xr.u32("vector dim");
    if (vcount != count || dim != c.corpus.dim) {
      throw ParseError("vocab/vector sections disagree on corpus shape", *voff);
    }
    for (std::uint32_t i = 0; i < vcount; ++i) {
      DenseVector vec(dim);
      for (auto& x : vec) x = xr.f32("vector component");
      c.corpus.add(std::move(words[i]), std::move(vec));
    }
  }

  if (const auto off = seek_section("invindex")) {
    open_at(*off);
    c.index = InvertedIndex::load(in);
  }
  if (const auto off = seek_section("projection")) {
    open_at(*off);
    c.projection = ProjectionModel::load(in);
    const auto poff = seek_section("points");
    if (!poff) throw ParseError("container has a projection but no points section", manifest_at);
    open_at(*poff);
    binio::Reader pr(in, *poff);
    const std::uint32_t count = pr.u32("point count");
    const std::uint32_t dim = pr.u32("point dim");
    c.reduced.assign(count, std::vector<double>(dim));
    for (auto& row : c.reduced) {
      for (auto& x : row) x = pr.f64("point component");
    }
    c.tree = KdTree::build(c.reduced);
  }

  const bool term_based = c.config.method == EvalConfig::Method::fake_words ||
                          c.config.method == EvalConfig::Method::lexical_lsh;
  if (term_based && !c.index) {
    throw ParseError("container config expects an inverted index section", manifest_at);
  }
  if (c.config.method == EvalConfig::Method::kdtree && !c.projection) {
    throw ParseError("container config expects a projection section", manifest_at);
  }
  return c;
}

std::vector<ScoredDoc> IndexContainer::search(const DenseVector& query, std::size_t depth,
                                              std::optional<double> df_cutoff_override,
                                              bool rerank) const {
  if (query.size() != corpus.dim) {
    throw std::invalid_argument("query dimension " + std::to_string(query.size()) +
                                " does not match the indexed dimension " +
                                std::to_string(corpus.dim));
  }
  const double cutoff = df_cutoff_override.value_or(config.df_cutoff);

  std::vector<ScoredDoc> out;
  switch (config.method) {
    case EvalConfig::Method::fake_words:
      out = index->search(encode_fake_words(normalize(query), config.fake_words), depth, cutoff);
      break;
    case EvalConfig::Method::lexical_lsh:
      out = index->search(encode_lexical_lsh(query, config.lexical_lsh), depth, cutoff);
      break;
    case EvalConfig::Method::kdtree:
      for (const KdTree::Neighbor& n : tree->knn(projection->transform(query), depth)) {
        out.push_back(ScoredDoc{n.doc_id, -n.distance});
      }
      break;
    case EvalConfig::Method::exact:
      for (DocId id : brute_force_topk(corpus, query, std::min(depth, corpus.size()))) {
        out.push_back(ScoredDoc{id, cosine(query, corpus.vectors[id])});
      }
      break;
  }
  if (rerank) {
    for (auto& s : out) s.score = cosine(query, corpus.vectors[s.doc_id]);
    std::sort(out.begin(), out.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.doc_id < b.doc_id;
    });
  }
  return out;
}

IndexContainer build_container(const EmbeddingCorpus& corpus, const EvalConfig& config,
                               std::uint64_t seed) {
  IndexContainer c;
  c.config = config;
  c.seed = seed;
  c.corpus = corpus;

  switch (config.method) {
    case EvalConfig::Method::fake_words: {
      InvertedIndex idx;
      idx.metadata = {{"dim", corpus.dim}, {"encoder", "fake-words"}, {"q", config.fake_words.q}};
      for (std::size_t i = 0; i < corpus.size(); ++i) {
        idx.add_document(TermDocument{
            static_cast<DocId>(i),
            encode_fake_words(normalize(corpus.vectors[i]), config.fake_words)});
      }
      c.index = std::move(idx);
      break;
    }
    case EvalConfig::Method::lexical_lsh: {
      InvertedIndex idx;
      idx.metadata = {{"dim", corpus.dim},
                      {"encoder", "lexical-lsh"},
                      {"n", config.lexical_lsh.ngram_len},
                      {"h", config.lexical_lsh.num_hashes},
                      {"b", config.lexical_lsh.num_buckets},
                      {"decimals", config.lexical_lsh.decimals}};
      for (std::size_t i = 0; i < corpus.size(); ++i) {
        idx.add_document(TermDocument{
            static_cast<DocId>(i),
            encode_lexical_lsh(corpus.vectors[i], config.lexical_lsh)});
      }
      c.index = std::move(idx);
      break;
    }
    case EvalConfig::Method::kdtree: {
      auto [model, reduced] = reduce(corpus.vectors, config.pipeline, config.reduced_dim,
                                     config.ppa_d);
      c.projection = std::move(model);
      c.reduced = std::move(reduced);
      c.tree = KdTree::build(c.reduced);
      break;
    }
    case EvalConfig::Method::exact:
      break;
  }
  return c;
}

}  // namespace lexann
