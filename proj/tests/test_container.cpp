#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "lexann/container.hpp"
#include "lexann/errors.hpp"
#include "testutil.hpp"

using namespace lexann;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path dir;
  TempDir() {
    dir = fs::temp_directory_path() / ("lexann_container_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~TempDir() { fs::remove_all(dir); }
  std::string file(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("fake-words container round-trips with bit-exact search scores") {
  TempDir tmp;
  const EmbeddingCorpus corpus = testutil::synthetic_embeddings(300, 24, 71);
  EvalConfig config;
  config.method = EvalConfig::Method::fake_words;
  config.fake_words.q = 40;
  config.df_cutoff = 0.9;

  const IndexContainer built = build_container(corpus, config, 7);
  built.save(tmp.file("index.lexann"));
  const IndexContainer loaded = IndexContainer::load(tmp.file("index.lexann"));

  CHECK(loaded.seed == 7);
  CHECK(loaded.config.fake_words.q == 40);
  CHECK(loaded.config.df_cutoff == 0.9);
  CHECK(loaded.corpus.size() == corpus.size());
  CHECK(loaded.corpus.words == corpus.words);
  CHECK(loaded.corpus.vectors == corpus.vectors);

  testutil::Rng rng(72);
  for (int trial = 0; trial < 20; ++trial) {
    const auto& q = corpus.vectors[rng.below(corpus.size())];
    const auto a = built.search(q, 10);
    const auto b = loaded.search(q, 10);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].doc_id == b[i].doc_id);
      CHECK(a[i].score == b[i].score);
    }
  }
}

TEST_CASE("kdtree container restores the projection and reduced points") {
  TempDir tmp;
  const EmbeddingCorpus corpus = testutil::synthetic_embeddings(400, 48, 73);
  EvalConfig config;
  config.method = EvalConfig::Method::kdtree;
  config.pipeline = ReductionPipeline::ppa_pca_ppa;
  config.reduced_dim = 6;
  config.ppa_d = 5;

  const IndexContainer built = build_container(corpus, config, 42);
  built.save(tmp.file("kd.lexann"));
  const IndexContainer loaded = IndexContainer::load(tmp.file("kd.lexann"));

  REQUIRE(loaded.projection.has_value());
  REQUIRE(loaded.reduced.size() == corpus.size());
  CHECK(loaded.reduced == built.reduced);  // bit-exact doubles

  for (const DocId q : {DocId{3}, DocId{111}, DocId{399}}) {
    const auto a = built.search(corpus.vectors[q], 8);
    const auto b = loaded.search(corpus.vectors[q], 8);
    REQUIRE(a.size() == b.size());
    CHECK(a[0].doc_id == q);  // the point itself, distance 0
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].doc_id == b[i].doc_id);
      CHECK(a[i].score == b[i].score);
    }
  }
}

TEST_CASE("container search never returns ids outside the corpus") {
  const EmbeddingCorpus corpus = testutil::synthetic_embeddings(150, 16, 74);
  EvalConfig config;
  config.method = EvalConfig::Method::lexical_lsh;
  config.lexical_lsh.num_buckets = 32;
  const IndexContainer built = build_container(corpus, config, 42);
  testutil::Rng rng(75);
  for (int trial = 0; trial < 10; ++trial) {
    DenseVector q(corpus.dim);
    for (auto& x : q) x = static_cast<float>(rng.uniform(-2.0, 2.0));
    for (const auto& hit : built.search(q, 150)) {
      CHECK(hit.doc_id < corpus.size());
    }
  }
}

TEST_CASE("resolve_path accepts directories and plain files") {
  TempDir tmp;
  fs::create_directories(tmp.file("idx"));
  CHECK(IndexContainer::resolve_path(tmp.file("idx")) ==
        (fs::path(tmp.file("idx")) / "index.lexann").string());
  CHECK(IndexContainer::resolve_path(tmp.file("direct.lexann")) == tmp.file("direct.lexann"));
}

TEST_CASE("loading a non-container file raises ParseError") {
  TempDir tmp;
  {
    std::ofstream out(tmp.file("junk.bin"), std::ios::binary);
    out << "LEXANNXX this is not a container";
  }
  CHECK_THROWS_AS(IndexContainer::load(tmp.file("junk.bin")), ParseError);
  CHECK_THROWS_AS(IndexContainer::load(tmp.file("missing.bin")), Error);
}

TEST_CASE("query dimension mismatches are rejected at search time") {
  const EmbeddingCorpus corpus = testutil::synthetic_embeddings(100, 12, 76);
  EvalConfig config;
  config.method = EvalConfig::Method::fake_words;
  const IndexContainer built = build_container(corpus, config, 42);
  CHECK_THROWS_AS(built.search({1.0f, 2.0f}, 5), std::invalid_argument);
}
