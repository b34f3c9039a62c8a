#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include "lexann/embeddings.hpp"
#include "lexann/errors.hpp"
#include "testutil.hpp"

using namespace lexann;

namespace {

namespace fs = std::filesystem;

struct TempFile {
  fs::path path;
  explicit TempFile(const std::string& name, const std::string& content)
      : path(fs::temp_directory_path() / name) {
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() { fs::remove(path); }
};

}  // namespace

TEST_CASE("glove text: two lines, dimension inferred") {
  TempFile f("lexann_glove1.txt", "cat 1.0 2.0 3.0\ndog 4.0 5.0 6.0\n");
  const EmbeddingCorpus c = load_embeddings(f.path.string(), EmbeddingFormat::glove_text);
  CHECK(c.size() == 2);
  CHECK(c.dim == 3);
  CHECK(c.words[0] == "cat");
  CHECK(c.vectors[1][2] == doctest::Approx(6.0));
  CHECK(c.lookup("dog") == DocId{1});
  CHECK(!c.lookup("fox").has_value());
}

TEST_CASE("word2vec text: header then body") {
  TempFile f("lexann_w2v1.txt", "2 3\ncat 1.0 2.0 3.0\ndog 4.0 5.0 6.0\n");
  const EmbeddingCorpus c = load_embeddings(f.path.string(), EmbeddingFormat::word2vec_text);
  CHECK(c.size() == 2);
  CHECK(c.dim == 3);
}

TEST_CASE("word2vec count mismatch is an error") {
  TempFile f("lexann_w2v2.txt", "5 3\na 1 2 3\nb 1 2 3\nc 1 2 3\nd 1 2 3\n");
  CHECK_THROWS_AS(load_embeddings(f.path.string(), EmbeddingFormat::word2vec_text), ParseError);
}

TEST_CASE("word2vec count check is skipped when --limit cuts the read short") {
  TempFile f("lexann_w2v3.txt", "5 3\na 1 2 3\nb 1 2 3\nc 1 2 3\nd 1 2 3\n");
  const EmbeddingCorpus c =
      load_embeddings(f.path.string(), EmbeddingFormat::word2vec_text, 2);
  CHECK(c.size() == 2);
}

TEST_CASE("dimension mismatch names the offending line") {
  TempFile f("lexann_glove2.txt", "cat 1.0 2.0 3.0\ndog 4.0 5.0\n");
  try {
    load_embeddings(f.path.string(), EmbeddingFormat::glove_text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("bad and non-finite floats are rejected with a line number") {
  TempFile f1("lexann_glove3.txt", "cat 1.0 zap 3.0\n");
  CHECK_THROWS_AS(load_embeddings(f1.path.string(), EmbeddingFormat::glove_text), ParseError);
  TempFile f2("lexann_glove4.txt", "cat 1.0 2.0 3.0\ndog 1.0 inf 3.0\n");
  try {
    load_embeddings(f2.path.string(), EmbeddingFormat::glove_text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("empty files are rejected") {
  TempFile f("lexann_glove5.txt", "");
  CHECK_THROWS_AS(load_embeddings(f.path.string(), EmbeddingFormat::glove_text), ParseError);
  CHECK_THROWS_AS(load_embeddings(f.path.string(), EmbeddingFormat::word2vec_text), ParseError);
}

TEST_CASE("missing file is an error") {
  CHECK_THROWS_AS(load_embeddings("/nonexistent/vectors.txt", EmbeddingFormat::glove_text),
                  Error);
}

TEST_CASE("limit keeps the first N entries, prefix-stable") {
  std::string content;
  for (int i = 0; i < 20; ++i) {
    content += "w" + std::to_string(i) + " 1.0 " + std::to_string(i) + ".0\n";
  }
  TempFile f("lexann_glove6.txt", content);
  const EmbeddingCorpus full = load_embeddings(f.path.string(), EmbeddingFormat::glove_text);
  const EmbeddingCorpus cut = load_embeddings(f.path.string(), EmbeddingFormat::glove_text, 5);
  REQUIRE(cut.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(cut.words[i] == full.words[i]);
    CHECK(cut.vectors[i] == full.vectors[i]);
  }
}

TEST_CASE("duplicate words are dropped and counted") {
  TempFile f("lexann_glove7.txt", "cat 1 2\ndog 3 4\ncat 5 6\n");
  const EmbeddingCorpus c = load_embeddings(f.path.string(), EmbeddingFormat::glove_text);
  CHECK(c.size() == 2);
  CHECK(c.duplicates_dropped == 1);
  CHECK(c.vectors[0][0] == doctest::Approx(1.0));  // first occurrence wins
}

TEST_CASE("CRLF line endings and trailing blank lines are tolerated") {
  TempFile f("lexann_glove8.txt", "cat 1.0 2.0\r\ndog 3.0 4.0\r\n\n");
  const EmbeddingCorpus c = load_embeddings(f.path.string(), EmbeddingFormat::glove_text);
  CHECK(c.size() == 2);
  CHECK(c.words[1] == "dog");
}

TEST_CASE("a generated 200-dim corpus loads back with the full shape") {
  // Stands in for the public GloVe Twitter file; set LEXANN_EMBEDDINGS to a
  // real file to run the same checks against it.
  namespace fs = std::filesystem;
  fs::path path;
  std::size_t expect_entries = 0;
  const char* real = std::getenv("LEXANN_EMBEDDINGS");
  TempFile* generated = nullptr;
  if (real != nullptr) {
    path = real;
  } else {
    const EmbeddingCorpus synth = testutil::synthetic_embeddings(2000, 200, 77);
    std::string content;
    char buf[32];
    for (std::size_t i = 0; i < synth.size(); ++i) {
      content += synth.words[i];
      for (float v : synth.vectors[i]) {
        std::snprintf(buf, sizeof(buf), " %.5f", static_cast<double>(v));
        content += buf;
      }
      content += '\n';
    }
    generated = new TempFile("lexann_glove9.txt", content);
    path = generated->path;
    expect_entries = 2000;
  }

  const EmbeddingCorpus c =
      load_embeddings(path.string(), EmbeddingFormat::glove_text, 10000);
  if (expect_entries > 0) CHECK(c.size() == expect_entries);
  CHECK(c.size() > 0);
  CHECK(c.dim > 0);
  for (const auto& vec : c.vectors) {
    REQUIRE(vec.size() == c.dim);
    for (float v : vec) REQUIRE(std::isfinite(v));
  }
  delete generated;
}

TEST_CASE("query word sampling is deterministic and in-vocabulary") {
  const EmbeddingCorpus c = testutil::synthetic_embeddings(500, 10, 5);
  const auto q1 = sample_query_words(c, 50, 42);
  const auto q2 = sample_query_words(c, 50, 42);
  const auto q3 = sample_query_words(c, 50, 43);
  CHECK(q1 == q2);
  CHECK(q1 != q3);
  CHECK(q1.size() == 50);
  std::set<std::string> distinct(q1.begin(), q1.end());
  CHECK(distinct.size() == 50);
  for (const auto& w : q1) CHECK(c.lookup(w).has_value());
}
