#include "lexann/embeddings.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include "lexann/errors.hpp"

namespace lexann {

EmbeddingFormat parse_embedding_format(std::string_view name) {
  if (name == "glove-text") return EmbeddingFormat::glove_text;
  if (name == "word2vec-text") return EmbeddingFormat::word2vec_text;
  throw std::invalid_argument("unknown embedding format '" + std::string(name) +
                              "' (expected 'glove-text' or 'word2vec-text')");
}

const char* embedding_format_name(EmbeddingFormat f) {
  return f == EmbeddingFormat::glove_text ? "glove-text" : "word2vec-text";
}

std::optional<DocId> EmbeddingCorpus::lookup(const std::string& word) const {
  auto it = vocab.find(word);
  if (it == vocab.end()) return std::nullopt;
  return it->second;
}

void EmbeddingCorpus::add(std::string word, DenseVector vector) {
  if (dim == 0 && words.empty()) {
    dim = vector.size();
  }
  if (vector.size() != dim) {
    throw std::invalid_argument("embedding dimension mismatch for word '" + word + "'");
  }
  if (vocab.count(word) != 0) {
    ++duplicates_dropped;
    return;
  }
  vocab.emplace(word, static_cast<DocId>(words.size()));
  words.push_back(std::move(word));
  vectors.push_back(std::move(vector));
}

namespace {

// Splits on runs of spaces/tabs; tolerates a trailing '\r' from CRLF files.
std::vector<std::string_view> split_fields(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

float parse_component(std::string_view field, std::size_t line_no, std::size_t offset) {
  float value = 0.0f;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError("line " + std::to_string(line_no) + ": bad float '" +
                         std::string(field) + "'",
                     offset, line_no);
  }
  if (!std::isfinite(value)) {
    throw ParseError("line " + std::to_string(line_no) + ": non-finite component '" +
                         std::string(field) + "'",
                     offset, line_no);
  }
  return value;
}

}  // namespace

EmbeddingCorpus load_embeddings(const std::string& path, EmbeddingFormat format,
                                std::size_t limit) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open '" + path + "' for reading");
  }

  EmbeddingCorpus corpus;
  corpus.source_format = format;

  std::string line;
  std::size_t line_no = 0;
  std::size_t offset = 0;
  std::size_t body_lines = 0;
  std::size_t declared_count = 0;

  if (format == EmbeddingFormat::word2vec_text) {
    if (!std::getline(in, line)) {
      throw ParseError("empty embedding file", 0, 0);
    }
    ++line_no;
    const auto fields = split_fields(line);
    std::size_t dim = 0;
    auto parse_size = [&](std::string_view f, std::size_t& out) {
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), out);
      return ec == std::errc() && ptr == f.data() + f.size();
    };
    if (fields.size() != 2 || !parse_size(fields[0], declared_count) ||
        !parse_size(fields[1], dim) || declared_count == 0 || dim == 0) {
      throw ParseError("line 1: expected word2vec header '<count> <dim>'", 0, 1);
    }
    corpus.dim = dim;
    offset += line.size() + 1;
  }

  while (std::getline(in, line)) {
    const std::size_t line_offset = offset;
    offset += line.size() + 1;
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.empty()) continue;  // blank line (common as a trailing newline)

    if (fields.size() < 2) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 'word f1 ... fm'",
                       line_offset, line_no);
    }
    if (corpus.dim == 0) {
      corpus.dim = fields.size() - 1;  // glove: inferred from the first entry
    }
    if (fields.size() - 1 != corpus.dim) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                           std::to_string(corpus.dim) + " components, got " +
                           std::to_string(fields.size() - 1),
                       line_offset, line_no);
    }
    ++body_lines;

    DenseVector vec(corpus.dim);
    for (std::size_t j = 0; j < corpus.dim; ++j) {
      vec[j] = parse_component(fields[j + 1], line_no, line_offset);
    }
    corpus.add(std::string(fields[0]), std::move(vec));
    if (limit > 0 && corpus.size() >= limit) break;
  }

  if (corpus.size() == 0) {
    throw ParseError("empty embedding file", 0, 0);
  }
  const bool limited = limit > 0 && corpus.size() >= limit;
  if (format == EmbeddingFormat::word2vec_text && !limited && body_lines != declared_count) {
    throw ParseError("word2vec header declares " + std::to_string(declared_count) +
                         " entries but the body has " + std::to_string(body_lines),
                     offset, line_no);
  }
  return corpus;
}

std::vector<std::string> sample_query_words(const EmbeddingCorpus& corpus,
                                            std::size_t count, std::uint64_t seed) {
  const std::size_t n = corpus.size();
  count = std::min(count, n);

  // Partial Fisher-Yates on the index range. mt19937_64 output is specified
  // by the standard, so the sample is identical across platforms.
  std::mt19937_64 rng(seed);
  std::vector<std::uint32_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::uint32_t>(i);
  std::vector<std::string> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (n - i));
    std::swap(idx[i], idx[j]);
    out.push_back(corpus.words[idx[i]]);
  }
  return out;
}

}  // namespace lexann
