#include "support.hpp"
#include "vizagent/error.hpp"
#include "vizagent/eval.hpp"
#include "vizagent/plotspec.hpp"
#include "vizagent/text.hpp"

#include <doctest.h>

#include <fstream>
#include <functional>

using namespace vizagent;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::IoError;
}

RubricScore score(const std::string& scenario, const std::string& assessor, SystemKind system, int quality) {
  RubricScore s;
  s.scenario = scenario;
  s.assessor = assessor;
  s.system = system;
  s.validity = 1;
  s.efficiency = 1;
  s.output_quality = quality;
  return s;
}

}  // namespace

TEST_CASE("aggregate examples") {
  auto a = aggregate(std::vector<int>{3, 3, 3});
  CHECK(a.mean == 3.0);
  CHECK(*a.sd == 0.0);
  CHECK(a.mode == 3);
  CHECK(a.n == 3);

  std::vector<int> s1(7, 3);
  s1.insert(s1.end(), 5, 4);
  a = aggregate(s1);
  CHECK(format_fixed(a.mean, 2) == "3.42");
  CHECK(format_fixed(*a.sd, 2) == "0.51");
  CHECK(a.mode == 3);

  CHECK(aggregate(std::vector<int>{0, 0, 3, 3}).mode == 0);
  CHECK_FALSE(aggregate(std::vector<int>{2}).sd.has_value());
  CHECK(code_of([] { aggregate(std::vector<int>{}); }) == ErrorCode::EmptyInput);
}

TEST_CASE("aggregate properties") {
  std::mt19937_64 rng(81);
  std::uniform_int_distribution<int> len(1, 20), val(0, 4);
  for (int t = 0; t < 300; ++t) {
    std::vector<int> v(static_cast<std::size_t>(len(rng)));
    for (auto& x : v) x = val(rng);
    const auto a = aggregate(v);
    auto shuffled = v;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto b = aggregate(shuffled);
    CHECK(b.mean == doctest::Approx(a.mean).epsilon(1e-15));
    CHECK(b.mode == a.mode);
    CHECK(b.n == a.n);
    CHECK(b.sd.has_value() == a.sd.has_value());
    if (a.sd) CHECK(std::abs(*b.sd - *a.sd) < 1e-12);
    const auto mode_freq = std::count(v.begin(), v.end(), a.mode);
    for (int k = 0; k <= 4; ++k) CHECK(mode_freq >= std::count(v.begin(), v.end(), k));
    CHECK(std::find(v.begin(), v.end(), a.mode) != v.end());
  }
}

TEST_CASE("improvement") {
  CHECK(improvement(2.60, 0.85).rounded == 206);
  CHECK(improvement(2.75, 0.75).rounded == 267);
  CHECK(improvement(2.75, 0.50).rounded == 450);
  CHECK(improvement(3.00, 0.42).rounded == 614);
  CHECK(improvement(2.00, 1.17).rounded == 71);
  CHECK(improvement(2.50, 1.42).rounded == 76);
  for (double x : {0.1, 1.0, 2.5, 17.0}) CHECK(improvement(x, x).percent == 0.0);
  CHECK(code_of([] { improvement(1.0, 0.0); }) == ErrorCode::ZeroBaseline);
  CHECK(code_of([] { improvement(1.0, -1.0); }) == ErrorCode::ZeroBaseline);
}

TEST_CASE("scenario_table") {
  SUBCASE("summary is the unweighted mean of scenario means") {
    const std::vector<double> proposed{2.75, 2.00, 2.75, 3.00, 2.50};
    const std::vector<double> baseline{0.75, 1.17, 0.50, 0.42, 1.42};
    CHECK(summary_of_means(proposed) == doctest::Approx(2.60));
    CHECK(format_fixed(summary_of_means(baseline), 2) == "0.85");
  }
  SUBCASE("single score has an undefined SD") {
    const std::vector<RubricScore> one{score("S1", "a", SystemKind::Proposed, 2)};
    const auto t = scenario_table(one);
    const auto* c = t.cell(SystemKind::Proposed, Metric::OutputQuality, "S1");
    REQUIRE(c != nullptr);
    CHECK(c->n == 1);
    CHECK_FALSE(c->sd.has_value());
    CHECK(t.cell(SystemKind::Baseline, Metric::OutputQuality, "S1") == nullptr);
  }
  SUBCASE("duplicates are rejected") {
    const std::vector<RubricScore> dup{score("S1", "a", SystemKind::Proposed, 2), score("S1", "a", SystemKind::Proposed, 3)};
    CHECK(code_of([&] { scenario_table(dup); }) == ErrorCode::DuplicateScore);
    const std::vector<RubricScore> ok{score("S1", "a", SystemKind::Proposed, 2), score("S1", "a", SystemKind::Baseline, 3)};
    CHECK_NOTHROW(scenario_table(ok));
  }
  SUBCASE("scores fixture reproduces the S1 correctness row") {
    const auto scores = parse_scores_jsonl(read_file(testing::fixture("scores_s1.jsonl")));
    const auto t = scenario_table(scores);
    const auto* c = t.cell(SystemKind::Proposed, Metric::Correctness, "S1");
    REQUIRE(c != nullptr);
    CHECK(format_fixed(c->mean, 2) == "3.42");
    CHECK(format_fixed(*c->sd, 2) == "0.51");
    CHECK(c->mode == 3);
    const auto text = format_table_text(t);
    CHECK(text.find("3.42") != std::string::npos);
    const auto csv = format_table_csv(t);
    CHECK(csv.find("proposed,correctness,S1,3.4167") != std::string::npos);
  }
}

TEST_CASE("score validation and parsing") {
  auto s = score("S1", "a", SystemKind::Proposed, 4);
  CHECK(code_of([&] { s.validate(); }) == ErrorCode::ScoreParseError);
  s.output_quality = 3;
  s.documentation = 2;
  CHECK(code_of([&] { s.validate(); }) == ErrorCode::ScoreParseError);

  try {
    parse_scores_jsonl("{\"scenario\": \"S1\"}\n");
    FAIL("expected ScoreParseError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ScoreParseError);
    CHECK(e.detail().find("line 1") != std::string::npos);
  }
  CHECK(code_of([] { parse_scores_jsonl("not json\n"); }) == ErrorCode::ScoreParseError);
  CHECK(code_of([] { parse_scores_jsonl("\n\n"); }) == ErrorCode::EmptyInput);
  CHECK(code_of([] { parse_scenario_means_jsonl(R"({"system": "proposed", "metric": "style", "scenario": "S1", "mean": 1})"); }) ==
        ErrorCode::ScoreParseError);
}

TEST_CASE("scenario means report") {
  const auto text = read_file(testing::fixture("scenario_means.jsonl"));
  CHECK(looks_like_scenario_means(text));
  CHECK_FALSE(looks_like_scenario_means(read_file(testing::fixture("scores_s1.jsonl"))));
  const auto report = format_means_report(parse_scenario_means_jsonl(text));
  CHECK(report.find("output_quality improvement summary: 206% (mean 2.60 vs 0.85)") != std::string::npos);
  CHECK(report.find("output_quality improvement S1: 267%") != std::string::npos);
  CHECK(report.find("output_quality improvement S2: 71%") != std::string::npos);
  CHECK(report.find("output_quality improvement S3: 450%") != std::string::npos);
  CHECK(report.find("output_quality improvement S4: 614%") != std::string::npos);
  CHECK(report.find("output_quality improvement S5: 76%") != std::string::npos);

  auto means = parse_scenario_means_jsonl(text);
  means.push_back(means.front());
  CHECK(code_of([&] { format_means_report(means); }) == ErrorCode::DuplicateScore);
}

TEST_CASE("assessor") {
  const Study s = load_study_file(testing::fixture("battery_study.json"));
  const auto req = classify("Please generate a history plot to check convergence.", s);
  const auto report = generate_report(s, req);
  const std::string artifact = mock_generate(report, req);
  AssessorRequest request{"S3", "ai", SystemKind::Proposed, artifact};

  SUBCASE("mock scores a compliant spec 3") {
    LlmGateway g{BackendConfig{}};
    const auto r = ai_assessor_score(request, default_rubric_prompt(), g, [&] { return mock_assessor_response(artifact, report); });
    CHECK(r.output_quality == 3);
    CHECK(r.validity == 1);
    CHECK(r.scenario == "S3");
    CHECK(r.assessor == "ai");
  }
  SUBCASE("mock deducts error-severity violations") {
    auto spec = parse_llm_output(artifact).spec;
    spec.annotations.clear();
    for (auto& series : spec.series) series.style = LineStyle::Solid;
    const auto r = parse_score_block(mock_assessor_response(fence_plotspec(spec), report), request);
    CHECK(r.output_quality == 1);
    const auto none = parse_score_block(mock_assessor_response("no spec here", report), request);
    CHECK(none.validity == 0);
    CHECK(none.output_quality == 0);
  }
  SUBCASE("replayed assessment") {
    testing::TempDir dir;
    const std::string reply = "```score\n{\"validity\": 1, \"efficiency\": 0, \"documentation\": 1, \"exception_handling\": 0, "
                              "\"cleanliness\": 1, \"output_quality\": 2}\n```\n";
    const std::string user = "Scenario: S3\nSystem: proposed\n\nArtifact under review:\n" + artifact;
    const auto bundle = simple_bundle(default_rubric_prompt(), user);
    const auto path = (dir.path() / "assess.jsonl").string();
    std::ofstream(path) << fixture_line(prompt_fingerprint(bundle), reply);
    BackendConfig c;
    c.mode = BackendMode::Replay;
    c.fixture_path = path;
    const auto r = ai_assessor_score(request, default_rubric_prompt(), LlmGateway(c));
    CHECK(r.output_quality == 2);
    CHECK(r.efficiency == 0);
    CHECK(r.correctness_total() == 2);
  }
  SUBCASE("malformed score blocks") {
    CHECK(code_of([&] { parse_score_block("no block", request); }) == ErrorCode::ScoreParseError);
    CHECK(code_of([&] { parse_score_block("```score\n{bad\n```", request); }) == ErrorCode::ScoreParseError);
    CHECK(code_of([&] {
            parse_score_block("```score\n{\"validity\": 1, \"efficiency\": 1, \"documentation\": 1, \"exception_handling\": 1, "
                              "\"cleanliness\": 1, \"output_quality\": 7}\n```",
                              request);
          }) == ErrorCode::ScoreParseError);
  }
}
