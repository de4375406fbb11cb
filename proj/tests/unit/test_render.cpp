#include "support.hpp"
#include "vizagent/error.hpp"
#include "vizagent/gateway.hpp"
#include "vizagent/plotspec.hpp"
#include "vizagent/text.hpp"

#include <doctest.h>

#include <cstdlib>
#include <functional>

using namespace vizagent;

namespace {

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + needle.size())) ++n;
  return n;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::IoError;
}

struct Rendered {
  Study study;
  PlotSpec spec;
  std::string svg;
};

Rendered through_mock(const char* file, const char* prompt) {
  Study s = load_study_file(testing::fixture(file));
  const auto req = classify(prompt, s);
  const auto report = generate_report(s, req);
  PlotSpec spec = parse_llm_output(mock_generate(report, req)).spec;
  std::string svg = render_svg(spec, s);
  return {std::move(s), std::move(spec), std::move(svg)};
}

PlotSpec one_series(const std::string& column, LineStyle style, bool normalized) {
  PlotSpec spec;
  spec.kind = RequestClass::HistoryPlot;
  spec.title = "History of " + column;
  spec.series.push_back({column, {column}, style, "blue", SeriesRole::Data, AxisSide::Left});
  spec.series.push_back({column + " best", {column}, LineStyle::Solid, "orange", SeriesRole::RunningBest, AxisSide::Left});
  spec.axes.push_back({column, column, normalized, AxisSide::Left});
  return spec;
}

}  // namespace

TEST_CASE("history structure") {
  const Study s = load_study_file(testing::fixture("bracket_study.json"));
  const auto svg = render_svg(one_series("Mass", LineStyle::Solid, false), s);
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(svg.find("width=\"960\" height=\"600\"") != std::string::npos);
  CHECK(count(svg, "<polyline class=\"data\"") == 1);
  CHECK(count(svg, "<polyline class=\"running-best\"") == 1);
  CHECK(svg.find("stroke-dasharray=\"6,4\"") == std::string::npos);

  const auto dashed = render_svg(one_series("Mass", LineStyle::Dashed, false), s);
  const auto line = dashed.substr(dashed.find("<polyline class=\"data\""));
  CHECK(line.substr(0, line.find("/>")).find("stroke-dasharray=\"6,4\"") != std::string::npos);
}

TEST_CASE("normalized axes keep original-unit tick labels") {
  const Study s = load_study_file(testing::fixture("bracket_study.json"));
  const auto values = numeric_series(s, "Mass").values;
  const double lo = *std::min_element(values.begin(), values.end());
  const double hi = *std::max_element(values.begin(), values.end());
  const auto svg = render_svg(one_series("Mass", LineStyle::Solid, true), s);
  CHECK(svg.find(">" + format_general(lo, 4) + "<") != std::string::npos);
  CHECK(svg.find(">" + format_general(hi, 4) + "<") != std::string::npos);
}

TEST_CASE("best design ring") {
  const auto r = through_mock("battery_study.json", "Please generate a history plot to check convergence.");
  CHECK(count(r.svg, "class=\"best-design\"") >= 2);
  CHECK(r.svg.find("data-design=\"11\"") != std::string::npos);
  CHECK(r.svg.find("data-design=\"14\"") != std::string::npos);

  const auto par = through_mock("battery_study.json", "Please generate a parallel plot.");
  CHECK(count(par.svg, "<polyline class=\"best-design-line\"") == 1);
  const auto rel = through_mock("battery_study.json", "2d relation plot with variables total mass and first torsional frequency");
  CHECK(count(rel.svg, "class=\"best-design\"") == 1);
}

TEST_CASE("render is a pure function") {
  for (const char* prompt : {"Please generate a history plot to check convergence.", "Please generate a parallel plot.",
                             "2d relation plot with variables total mass and total cost"}) {
    const auto a = through_mock("battery_study.json", prompt);
    CHECK(render_svg(a.spec, a.study) == a.svg);
  }
  std::mt19937_64 rng(71);
  for (int i = 0; i < 60; ++i) {
    const Study s = testing::random_study(rng, i);
    const auto req = classify(testing::random_prompt(rng, s, i % 3), s);
    const auto spec = parse_llm_output(mock_generate(generate_report(s, req), req)).spec;
    const auto svg = render_svg(spec, s);
    CHECK(svg == render_svg(spec, s));
    CHECK(svg.find("nan") == std::string::npos);
    CHECK(svg.find("inf") == std::string::npos);
  }
}

TEST_CASE("goldens") {
  struct Golden {
    const char* file;
    const char* prompt;
  };
  const Golden goldens[] = {
      {"history.svg", "Please generate a history plot to check convergence."},
      {"relation.svg",
       "please generate python code for 2d relation plot with variables total mass, first torsional frequency and total cost"},
      {"parallel.svg", "Please generate a parallel plot."},
  };
  for (const auto& g : goldens) {
    const auto r = through_mock("battery_study.json", g.prompt);
    CHECK_MESSAGE(r.svg == read_file(testing::fixture(std::string("goldens/") + g.file)), g.file);
  }
}

TEST_CASE("render errors") {
  const Study s = load_study_file(testing::fixture("bracket_study.json"));
  CHECK(code_of([&] { render_svg(one_series("Ghost", LineStyle::Solid, false), s); }) == ErrorCode::UnknownColumn);

  Study empty = testing::tiny_study({1, 2}, {3, 4});
  empty.responses.push_back("Never");
  for (auto& d : empty.designs) d.values["Never"] = std::monostate{};
  CHECK(code_of([&] { render_svg(one_series("Never", LineStyle::Solid, false), empty); }) == ErrorCode::EmptySeries);

  auto bad = one_series("Mass", LineStyle::Solid, false);
  bad.series.clear();
  CHECK(code_of([&] { render_svg(bad, s); }) == ErrorCode::SpecInvariantError);
}
