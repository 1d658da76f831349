#include <catch2/catch_amalgamated.hpp>

#include <sstream>
#include <string>
#include <vector>

#include "kgae/corpus.hpp"
#include "kgae/rng.hpp"

using kgae::build_cooccurrence;
using kgae::build_dtm;
using kgae::CooccurrenceMatrix;
using kgae::DocTermMatrix;
using kgae::TokenizedCorpus;

namespace {

TokenizedCorpus corpus_from(const std::string& text) {
  std::istringstream in(text);
  return kgae::read_corpus(in);
}

}  // namespace

TEST_CASE("corpus reader assigns first-appearance indices") {
  const auto c = corpus_from("a b a\nb c\n");
  REQUIRE(c.vocabulary == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(c.documents.size() == 2);
  CHECK(c.documents[0] == std::vector<std::size_t>{0, 1, 0});
  CHECK(c.documents[1] == std::vector<std::size_t>{1, 2});
}

TEST_CASE("empty corpus gives an empty matrix") {
  const auto dtm = build_dtm(corpus_from(""));
  CHECK(dtm.rows() == 0);
  CHECK(dtm.cols() == 0);
}

TEST_CASE("dtm counts token multiplicities") {
  const auto dtm = build_dtm(corpus_from("a b a\nb c\n"));
  REQUIRE(dtm.rows() == 2);
  REQUIRE(dtm.cols() == 3);
  CHECK(dtm(0, 0) == 2);  // a
  CHECK(dtm(0, 1) == 1);  // b
  CHECK(dtm(0, 2) == 0);  // c
  CHECK(dtm(1, 0) == 0);
  CHECK(dtm(1, 1) == 1);
  CHECK(dtm(1, 2) == 1);
}

TEST_CASE("repeated token document") {
  const auto dtm = build_dtm(corpus_from("x x x\n"));
  REQUIRE(dtm.rows() == 1);
  REQUIRE(dtm.cols() == 1);
  CHECK(dtm(0, 0) == 3);
}

TEST_CASE("co-occurrence counts documents sharing both words") {
  const auto co = build_cooccurrence(build_dtm(corpus_from("a b a\nb c\n")));
  CHECK(co(0, 1) == 1);  // a,b
  CHECK(co(1, 2) == 1);  // b,c
  CHECK(co(0, 2) == 0);  // a,c
  CHECK(co(0, 0) == 1);  // document frequency on the diagonal
  CHECK(co(1, 1) == 2);
  CHECK(co(2, 2) == 1);
}

TEST_CASE("single-word corpus") {
  const auto co = build_cooccurrence(build_dtm(corpus_from("solo\n")));
  REQUIRE(co.rows() == 1);
  CHECK(co(0, 0) == 1);
}

TEST_CASE("identical documents double the pair count") {
  const auto co = build_cooccurrence(build_dtm(corpus_from("a b\na b\n")));
  CHECK(co(0, 1) == 2);
}

TEST_CASE("co-occurrence is symmetric and bounded by document frequency") {
  kgae::SplitMix64 g(31);
  const char* words[] = {"w0", "w1", "w2", "w3", "w4", "w5", "w6", "w7"};
  for (int trial = 0; trial < 30; ++trial) {
    std::ostringstream text;
    const std::size_t docs = 1 + g.next_below(8);
    for (std::size_t d = 0; d < docs; ++d) {
      const std::size_t len = g.next_below(12);
      for (std::size_t t = 0; t < len; ++t) {
        if (t) text << ' ';
        text << words[g.next_below(8)];
      }
      text << '\n';
    }
    const auto co = build_cooccurrence(build_dtm(corpus_from(text.str())));
    for (std::size_t u = 0; u < co.rows(); ++u)
      for (std::size_t v = 0; v < co.cols(); ++v) {
        REQUIRE(co(u, v) == co(v, u));
        REQUIRE(co(u, v) <= std::min(co(u, u), co(v, v)));
      }
  }
}

TEST_CASE("vocabulary mapping prefers exact matches, then case folds") {
  const std::vector<std::string> generic{"paris", "Rome", "berlin"};

  auto subset = kgae::map_sparse_vocab({"Rome", "berlin"}, generic);
  CHECK(subset.unmatched.empty());
  CHECK(subset.pairs.at("Rome") == 1);
  CHECK(subset.pairs.at("berlin") == 2);

  auto disjoint = kgae::map_sparse_vocab({"tokyo", "oslo"}, generic);
  CHECK(disjoint.pairs.empty());
  CHECK(disjoint.unmatched == std::vector<std::string>{"tokyo", "oslo"});

  auto folded = kgae::map_sparse_vocab({"Paris"}, generic);
  CHECK(folded.unmatched.empty());
  CHECK(folded.pairs.at("Paris") == 0);
}

TEST_CASE("graph construction from the toy corpus") {
  // d2 doubled: co(a,b)=1 and co(b,c)=2.
  const auto corpus = corpus_from("a b a\nb c\nb c\n");
  const auto co = build_cooccurrence(build_dtm(corpus));
  kgae::MatD real(co.rows(), co.cols());
  for (std::size_t i = 0; i < co.data().size(); ++i)
    real.data()[i] = static_cast<double>(co.data()[i]);
  const auto map = kgae::svd_embed(real, 1);

  kgae::Dataset props(3, 2);
  for (std::size_t i = 0; i < props.data().size(); ++i) props.data()[i] = 0.1 * (double)i;
  const auto kg = kgae::build_graph(map, co, corpus.vocabulary, props, {"x", "y"});

  CHECK(kg.entity_count() == 3);
  REQUIRE(kg.edges().size() == 2);
  for (const auto& e : kg.edges()) {
    CHECK(e.weight == static_cast<double>(co(e.u, e.v)));
  }
  const auto& ids = kg.entity_ids();
  CHECK(ids == std::vector<std::string>{"a", "b", "c"});
  CHECK(kg.edges()[0].weight == 1.0);  // a-b
  CHECK(kg.edges()[1].weight == 2.0);  // b-c
}

TEST_CASE("all-zero off-diagonal gives no edges, single word is isolated") {
  const auto corpus = corpus_from("a\nb\n");
  const auto co = build_cooccurrence(build_dtm(corpus));
  kgae::MatD real(co.rows(), co.cols());
  for (std::size_t i = 0; i < co.data().size(); ++i)
    real.data()[i] = static_cast<double>(co.data()[i]);
  const auto map = kgae::svd_embed(real, 1);
  kgae::Dataset props(2, 1);
  const auto kg = kgae::build_graph(map, co, corpus.vocabulary, props);
  CHECK(kg.edges().empty());

  const auto solo = corpus_from("only\n");
  const auto co1 = build_cooccurrence(build_dtm(solo));
  kgae::MatD real1(1, 1);
  real1(0, 0) = 1.0;
  const auto kg1 =
      kgae::build_graph(kgae::svd_embed(real1, 1), co1, solo.vocabulary, kgae::Dataset(1, 1));
  CHECK(kg1.entity_count() == 1);
  CHECK(kg1.edges().empty());
}

TEST_CASE("graph construction rejects mismatched inputs") {
  const auto corpus = corpus_from("a b\n");
  const auto co = build_cooccurrence(build_dtm(corpus));
  kgae::MatD real(co.rows(), co.cols());
  for (std::size_t i = 0; i < co.data().size(); ++i)
    real.data()[i] = static_cast<double>(co.data()[i]);
  const auto map = kgae::svd_embed(real, 1);
  CHECK_THROWS_AS(
      kgae::build_graph(map, co, corpus.vocabulary, kgae::Dataset(3, 2)),
      std::invalid_argument);
  CHECK_THROWS_AS(
      kgae::build_graph(map, kgae::CooccurrenceMatrix(3, 3), corpus.vocabulary,
                        kgae::Dataset(2, 2)),
      std::invalid_argument);
}

TEST_CASE("graph file round trip") {
  kgae::KnowledgeGraph kg({"x", "y"});
  kg.add_entity("a", std::vector<double>{0.1, 0.9});
  kg.add_entity("b", std::vector<double>{0.4, 0.2});
  kg.add_edge("a", "b", 2.0);
  std::ostringstream out;
  kgae::write_graph(out, kg);
  std::istringstream in(out.str());
  const auto back = kgae::read_graph(in);
  CHECK(back.entity_ids() == kg.entity_ids());
  CHECK(back.property_names() == kg.property_names());
  REQUIRE(back.edges().size() == 1);
  CHECK(back.edges()[0].weight == 2.0);
  CHECK(back.properties_of(0)[1] == 0.9);
}

TEST_CASE("graph reader rejects malformed input") {
  std::istringstream missing("entity a 1\nend\n");
  CHECK_THROWS_AS(kgae::read_graph(missing), kgae::io_error);
  std::istringstream bad_entity("kgae-graph v1\nproperties x\nentity a\nend\n");
  CHECK_THROWS_AS(kgae::read_graph(bad_entity), kgae::io_error);
  std::istringstream self_loop("kgae-graph v1\nproperties x\nentity a 1\nedge a a 1\nend\n");
  CHECK_THROWS_AS(kgae::read_graph(self_loop), std::invalid_argument);
  std::istringstream no_end("kgae-graph v1\nproperties x\nentity a 1\n");
  CHECK_THROWS_AS(kgae::read_graph(no_end), kgae::io_error);
}
