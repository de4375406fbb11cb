#include "support.hpp"
#include "vizagent/error.hpp"
#include "vizagent/prompt.hpp"
#include "vizagent/text.hpp"

#include <doctest.h>

#include <fstream>

using namespace vizagent;

namespace {

std::size_t occurrences(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + needle.size())) ++n;
  return n;
}

struct HistoryCase {
  Study study = load_study_file(testing::fixture("bracket_study.json"));
  ClassifiedRequest request = classify("Please generate a history plot to check convergence.", study);
  AnalysisReport report = generate_report(study, request);
};

std::vector<Document> snippets() {
  return {{"s1", "first snippet text", {}, std::nullopt},
          {"s2", "second snippet, somewhat longer text", {}, std::nullopt},
          {"s3", "third and lowest ranked snippet", {}, std::nullopt}};
}

}  // namespace

TEST_CASE("guideline sets") {
  const auto& h = guidelines_for(RequestClass::HistoryPlot);
  std::vector<std::string> ids;
  for (const auto& r : h.rules) ids.push_back(r.id);
  CHECK(ids == std::vector<std::string>{"H1", "H2", "H3", "H4", "H5", "H6"});
  CHECK(h.rule("H2")->text.find("no more than 2 variables") != std::string::npos);
  CHECK(h.rule("H3")->text.find("dashed") != std::string::npos);
  CHECK(h.rule("H1")->text.find("best design") != std::string::npos);

  const auto& r = guidelines_for(RequestClass::Relation2D);
  REQUIRE(r.rule("R2") != nullptr);
  CHECK(r.rule("R2")->text.find("color") != std::string::npos);
  CHECK(r.rule("R5")->severity == Severity::Warning);

  const auto& p = guidelines_for(RequestClass::ParallelPlot);
  CHECK(p.rule("P2")->severity == Severity::Error);

  try {
    guidelines_for(RequestClass::Unsupported);
    FAIL("expected UnsupportedKind");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnsupportedKind);
  }
}

TEST_CASE("guideline files") {
  const auto g = parse_guideline_set(R"({"kind": "HistoryPlot", "version": 2,
      "rules": [{"id": "X1", "text": "Keep it simple.", "severity": "warning"}]})");
  CHECK(g.version == 2);
  CHECK(g.rules.at(0).severity == Severity::Warning);
  CHECK_THROWS_AS(parse_guideline_set(R"({"kind": "Pie", "rules": []})"), Error);
  CHECK_THROWS_AS(parse_guideline_set(R"({"kind": "HistoryPlot", "rules": [{"id": "A", "text": "t", "severity": "fatal"}]})"),
                  Error);
  CHECK_THROWS_AS(parse_guideline_set(R"({"kind": "HistoryPlot", "rules": [{"id": "A", "text": "t", "severity": "error"},
                                                                          {"id": "A", "text": "u", "severity": "error"}]})"),
                  Error);

  testing::TempDir dir;
  std::ofstream(dir.path() / "h.json") << R"({"kind": "HistoryPlot", "rules": [{"id": "H1", "text": "Edited rule.", "severity": "error"}]})";
  const auto catalog = GuidelineCatalog::load_directory(dir.str());
  CHECK(catalog.guidelines_for(RequestClass::HistoryPlot).rules.at(0).text == "Edited rule.");
  CHECK_THROWS_AS(catalog.guidelines_for(RequestClass::ParallelPlot), Error);
}

TEST_CASE("assemble") {
  HistoryCase c;
  const auto& g = guidelines_for(RequestClass::HistoryPlot);
  const auto a = assemble(default_system_text(), g, c.report, snippets(), c.request.raw_prompt);
  const auto b = assemble(default_system_text(), g, c.report, snippets(), c.request.raw_prompt);
  CHECK(a.assembled == b.assembled);

  SUBCASE("section order") {
    const auto& t = a.assembled;
    const auto sys = t.find("### SECTION: SYSTEM"), gl = t.find("### SECTION: GUIDELINES"),
               rep = t.find("### SECTION: ANALYSIS REPORT"), ex = t.find("### SECTION: RETRIEVED EXAMPLES"),
               user = t.find("### SECTION: USER REQUEST");
    CHECK(sys == 0);
    CHECK(sys < gl);
    CHECK(gl < rep);
    CHECK(rep < ex);
    CHECK(ex < user);
  }
  SUBCASE("converged report line and rule H3 verbatim") {
    CHECK(a.assembled.find("converged") != std::string::npos);
    CHECK(a.assembled.find(g.rule("H3")->text) != std::string::npos);
    CHECK(a.assembled.find(output_contract_text()) != std::string::npos);
  }
  SUBCASE("every rule text appears exactly once") {
    for (const auto& r : g.rules) CHECK(occurrences(a.assembled, r.text) == 1);
  }
  SUBCASE("empty snippet list is marked") {
    const auto e = assemble(default_system_text(), g, c.report, {}, "x");
    CHECK(e.assembled.find(kNoExamplesMarker) != std::string::npos);
    CHECK(a.assembled.find(kNoExamplesMarker) == std::string::npos);
  }
  SUBCASE("length is the parts plus a fixed overhead") {
    auto parts = [](const PromptBundle& p) {
      std::size_t n = p.system_text.size() + p.output_contract.size() + p.guideline_text.size() + p.report_text.size() +
                      p.user_text.size();
      for (const auto& s : p.snippet_texts) n += s.size();
      return n;
    };
    auto longer = snippets();
    for (auto& d : longer) d.text += " with many more words appended to change its length";
    const auto x = assemble("short system", g, c.report, snippets(), "u");
    const auto y = assemble("a much longer system text than before", g, c.report, longer, "a longer user request");
    CHECK(x.assembled.size() - parts(x) == y.assembled.size() - parts(y));
  }
  SUBCASE("max length drops snippets from the lowest rank up") {
    const auto full = a.assembled.size();
    AssembleOptions opts;
    opts.max_length = full - 1;
    const auto cut = assemble(default_system_text(), g, c.report, snippets(), c.request.raw_prompt, opts);
    CHECK(cut.snippet_ids == std::vector<std::string>{"s1", "s2"});
    CHECK(cut.dropped_snippets == std::vector<std::string>{"s3"});
    CHECK(cut.assembled.size() <= opts.max_length);

    opts.max_length = 10;
    const auto tiny = assemble(default_system_text(), g, c.report, snippets(), c.request.raw_prompt, opts);
    CHECK(tiny.snippet_ids.empty());
    CHECK(tiny.dropped_snippets == std::vector<std::string>{"s1", "s2", "s3"});
    CHECK(tiny.assembled.find(c.report.rendered_text) != std::string::npos);
    for (const auto& r : g.rules) CHECK(occurrences(tiny.assembled, r.text) == 1);
  }
  SUBCASE("system message stops before the user section") {
    CHECK(a.system_message().find("### SECTION: USER REQUEST") == std::string::npos);
    CHECK(a.assembled.rfind(a.system_message(), 0) == 0);
  }
}

TEST_CASE("simple bundle") {
  const auto b = simple_bundle("sys", "hello");
  CHECK(b.assembled.find("sys") != std::string::npos);
  CHECK(b.assembled.find("hello") != std::string::npos);
  CHECK(b.system_message().find("hello") == std::string::npos);
}
