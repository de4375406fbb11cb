#include "support.hpp"
#include "tfidf_oracle.hpp"
#include "vizagent/error.hpp"
#include "vizagent/knowledge.hpp"

#include <doctest.h>

#include <fstream>

using namespace vizagent;

namespace {

std::vector<Document> three_docs() {
  return {{"a", "history plot convergence best design", {}, RequestClass::HistoryPlot},
          {"b", "scatter plot relation feasibility color", {}, RequestClass::Relation2D},
          {"c", "convergence history dashed solid history", {}, std::nullopt}};
}

}  // namespace

TEST_CASE("tokenizer") {
  CHECK(tokenize_terms("Total_Mass vs. a 2D-plot!") == std::vector<std::string>{"total", "mass", "vs", "2d", "plot"});
  CHECK(tokenize_terms("") .empty());
  CHECK(tokenize_terms("x y z").empty());
  CHECK(tokenize_terms("caf\xc3\xa9 ok") == std::vector<std::string>{"caf", "ok"});
}

TEST_CASE("build_index") {
  SUBCASE("single document") {
    const auto idx = Index::build({{"only", "history plot", {}, std::nullopt}});
    CHECK(idx.document_count() == 1);
    CHECK(idx.vocabulary().size() == 2);
    CHECK(idx.document_frequency("history") == 1);
  }
  SUBCASE("document frequencies match a hand count") {
    const auto idx = Index::build(three_docs());
    CHECK(idx.document_frequency("history") == 2);
    CHECK(idx.document_frequency("plot") == 2);
    CHECK(idx.document_frequency("convergence") == 2);
    CHECK(idx.document_frequency("dashed") == 1);
    CHECK(idx.document_frequency("missing") == 0);
    CHECK(idx.vocabulary().size() == 11);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(Index::build({}), Error);
    try {
      Index::build({});
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EmptyCorpus);
    }
    try {
      Index::build({{"x", "one", {}, std::nullopt}, {"x", "two", {}, std::nullopt}});
      FAIL("expected DuplicateId");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DuplicateId);
    }
  }
  SUBCASE("rebuild is identical and survives a JSON round trip") {
    const auto a = Index::build(three_docs());
    auto docs = three_docs();
    std::reverse(docs.begin(), docs.end());
    CHECK(Index::build(docs) == a);
    CHECK(Index::from_json(a.to_json()) == a);
  }
}

TEST_CASE("retrieve on the three-document fixture") {
  const auto idx = Index::build(three_docs());
  const auto hits = idx.retrieve("history plot convergence", 3);
  REQUIRE(hits.size() == 3);
  // Values computed by hand from idf = ln(4/(df+1)) + 1.
  CHECK(hits[0].document_id == "a");
  CHECK(hits[0].score == doctest::Approx(0.6815813988383661).epsilon(1e-12));
  CHECK(hits[1].document_id == "c");
  CHECK(hits[1].score == doctest::Approx(0.5955681463526787).epsilon(1e-12));
  CHECK(hits[2].document_id == "b");
  CHECK(hits[2].score == doctest::Approx(0.2052090309921715).epsilon(1e-12));
  for (std::size_t i = 0; i < hits.size(); ++i) CHECK(hits[i].rank == i + 1);

  CHECK(idx.retrieve("quantum banana", 3).empty());
  CHECK(idx.retrieve("history plot convergence best design", 1)[0].document_id == "a");

  SUBCASE("filter excludes other kinds and keeps untagged documents") {
    const auto filtered = idx.retrieve("history plot convergence", 3, RequestClass::Relation2D);
    REQUIRE(filtered.size() == 2);
    CHECK(filtered[0].document_id == "c");
    CHECK(filtered[1].document_id == "b");
  }
  SUBCASE("increasing k keeps the prefix") {
    const auto one = idx.retrieve("history plot convergence", 1);
    const auto two = idx.retrieve("history plot convergence", 2);
    CHECK(one[0] == two[0]);
    CHECK(two[0] == hits[0]);
    CHECK(two[1] == hits[1]);
  }
  SUBCASE("k must be positive") {
    CHECK_THROWS_AS(idx.retrieve("history", 0), Error);
  }
}

TEST_CASE("shipped corpus agrees with the reference scorer") {
  const auto docs = load_corpus(testing::data_dir() + "/corpus");
  REQUIRE(docs.size() == 20);
  const auto idx = Index::build(docs);
  std::vector<testing::OracleDoc> odocs;
  for (const auto& d : docs) odocs.push_back({d.id, d.text});
  for (const char* q : {"history plot convergence", "dashed line running best", "scatter feasibility color",
                        "parallel normalized axes", "scale disparity log"}) {
    const auto want = testing::oracle_rank(odocs, q);
    const auto got = idx.retrieve(q, docs.size());
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].document_id == want[i].id);
      CHECK(std::abs(got[i].score - static_cast<double>(want[i].score)) < 1e-9);
    }
  }
}

TEST_CASE("snippet front matter") {
  const auto d = parse_snippet("---\nid: demo\ntags: history, convergence\nplot_kind: HistoryPlot\n---\nBody text.\n", "demo.md");
  CHECK(d.id == "demo");
  CHECK(d.tags == std::vector<std::string>{"history", "convergence"});
  CHECK(d.plot_kind == RequestClass::HistoryPlot);
  CHECK(d.text.find("Body text.") != std::string::npos);

  const auto any = parse_snippet("---\nid: generic\nplot_kind: any\n---\nx y\n", "g.md");
  CHECK_FALSE(any.plot_kind.has_value());

  CHECK_THROWS_AS(parse_snippet("no front matter", "bad.md"), Error);
  CHECK_THROWS_AS(parse_snippet("---\nid: x\n", "open.md"), Error);
  CHECK_THROWS_AS(parse_snippet("---\nid: x\nplot_kind: Pie\n---\nbody\n", "kind.md"), Error);

  testing::TempDir dir;
  CHECK_THROWS_AS(load_corpus(dir.str() + "/nope"), Error);
  std::ofstream(dir.path() / "b.md") << "---\nid: bee\n---\nsecond\n";
  std::ofstream(dir.path() / "a.md") << "---\nid: ay\n---\nfirst\n";
  std::ofstream(dir.path() / "ignored.json") << "{}";
  const auto corpus = load_corpus(dir.str());
  REQUIRE(corpus.size() == 2);
  CHECK(corpus[0].id == "ay");
}
