#include "support.hpp"
#include "vizagent/analysis.hpp"
#include "vizagent/error.hpp"
#include "vizagent/router.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cmath>
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

ConvergenceParams window(std::size_t w) {
  ConvergenceParams p;
  p.window = w;
  return p;
}

}  // namespace

TEST_CASE("assess_convergence examples") {
  const std::vector<double> constant(10, 50.0);
  auto st = assess_convergence(constant, window(5));
  CHECK(st.converged);
  CHECK(st.rel_range == 0.0);
  CHECK(st.window_used == 5);

  std::vector<double> falling;
  for (int v = 100; v >= 10; v -= 10) falling.push_back(v);
  st = assess_convergence(falling, window(5));
  CHECK_FALSE(st.converged);
  CHECK(st.rel_range == doctest::Approx(40.0 / 50.0));

  const std::vector<double> tail{50.0, 50.2, 49.9, 50.1, 50.0};
  st = assess_convergence(tail, window(5));
  CHECK(st.converged);
  CHECK(st.rel_range == doctest::Approx(0.3 / 50.2).epsilon(1e-12));

  // Shorter than the window: range is still reported, verdict is not converged.
  st = assess_convergence(std::vector<double>{1.0, 1.0, 1.0}, window(5));
  CHECK_FALSE(st.converged);
  CHECK(st.window_used == 3);
  CHECK(st.rel_range == 0.0);
}

TEST_CASE("assess_convergence errors") {
  CHECK(code_of([] { assess_convergence(std::vector<double>{1.0, NAN}, {}); }) == ErrorCode::NonFiniteValue);
  CHECK(code_of([] { assess_convergence(std::vector<double>{1.0, INFINITY}, {}); }) == ErrorCode::NonFiniteValue);
  CHECK(code_of([] { assess_convergence(std::vector<double>{}, {}); }) == ErrorCode::EmptySeries);
  CHECK(code_of([] { assess_convergence(std::vector<double>{1.0}, window(1)); }) == ErrorCode::InvalidArgument);
  ConvergenceParams bad;
  bad.rel_tol = 0.0;
  CHECK(code_of([&] { assess_convergence(std::vector<double>{1.0}, bad); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("assess_convergence is scale-equivariant when the floor scales too") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.5, 1.5), c(1e-3, 1e3);
  for (int t = 0; t < 300; ++t) {
    std::vector<double> series(20);
    for (auto& v : series) v = u(rng);
    const double k = c(rng);
    ConvergenceParams p;
    p.rel_tol = 0.3;
    ConvergenceParams q = p;
    q.abs_floor = p.abs_floor * k;
    std::vector<double> scaled(series);
    for (auto& v : scaled) v *= k;
    CHECK(assess_convergence(series, p).converged == assess_convergence(scaled, q).converged);
  }
}

TEST_CASE("running_best") {
  CHECK(running_best(std::vector<double>{5, 7, 3, 4}, Direction::Minimize) == std::vector<double>{5, 5, 3, 3});
  CHECK(running_best(std::vector<double>{1, 1, 1}, Direction::Maximize) == std::vector<double>{1, 1, 1});
  CHECK(running_best(std::vector<double>{1, 3, 2, 5}, Direction::Maximize) == std::vector<double>{1, 3, 3, 5});

  std::mt19937_64 rng(17);
  std::normal_distribution<double> g(0.0, 10.0);
  std::vector<double> series(100);
  for (auto& v : series) v = g(rng);
  const auto best = running_best(series, Direction::Minimize);
  for (std::size_t i = 0; i < series.size(); ++i) {
    CHECK(best[i] == *std::min_element(series.begin(), series.begin() + static_cast<long>(i) + 1));
    CHECK(best[i] <= series[i]);
    if (i > 0) CHECK(best[i] <= best[i - 1]);
  }
}

TEST_CASE("best_design") {
  Study s = testing::tiny_study({10, 8, 8}, {50, 50, 50});
  auto b = best_design(s, "Mass", false);
  CHECK(b.design_id == 1);
  CHECK(b.value == 8);

  SUBCASE("feasible_only skips an infeasible optimum") {
    Study t = testing::tiny_study({10, 5, 8, 9}, {50, 150, 50, 50});
    CHECK(best_design(t, "Mass", false).design_id == 1);
    const auto f = best_design(t, "Mass", true);
    CHECK(f.design_id == 2);
    CHECK(f.feasible_only);
  }
  SUBCASE("maximize with one design") {
    Study one = testing::tiny_study({4}, {1});
    one.objectives[0].direction = Direction::Maximize;
    CHECK(best_design(one, "Mass", false).design_id == 0);
  }
  SUBCASE("no feasible design") {
    Study none = testing::tiny_study({1, 2}, {500, 600});
    CHECK(code_of([&] { best_design(none, "Mass", true); }) == ErrorCode::NoEligibleDesign);
    CHECK(code_of([&] { best_design(none, "Stress", false); }) == ErrorCode::UnknownColumn);
  }
  SUBCASE("feasible-complete study gives the same answer either way") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 100; ++i) {
      Study r = testing::random_study(rng, i);
      r.constraints.clear();
      for (const auto& o : r.objectives) {
        auto a = best_design(r, o.name, false);
        auto f = best_design(r, o.name, true);
        CHECK(a.design_id == f.design_id);
        CHECK(a.value == f.value);
      }
    }
  }
  SUBCASE("battery brute force over the feasibility mask") {
    const Study battery = load_study_file(testing::fixture("battery_study.json"));
    const auto mask = feasibility_mask(battery);
    for (const auto& o : battery.objectives) {
      std::optional<std::pair<double, DesignId>> oracle;
      for (std::size_t i = 0; i < battery.designs.size(); ++i) {
        if (!mask[i]) continue;
        const double v = std::get<double>(battery.designs[i].values.at(o.name));
        const bool better = !oracle || (o.direction == Direction::Minimize ? v < oracle->first : v > oracle->first);
        if (better) oracle = std::pair{v, battery.designs[i].design_id};
      }
      const auto got = best_design(battery, o.name, true);
      CHECK(got.design_id == oracle->second);
      CHECK(got.value == oracle->first);
    }
  }
}

TEST_CASE("pearson_correlation") {
  CHECK(*pearson_correlation(std::vector<double>{0, 1, 2}, std::vector<double>{0, 1, 2}).r == doctest::Approx(1.0));
  CHECK(*pearson_correlation(std::vector<double>{0, 1}, std::vector<double>{1, 0}).r == doctest::Approx(-1.0));
  CHECK(*pearson_correlation(std::vector<double>{1, 2, 3, 4}, std::vector<double>{2, 1, 4, 3}).r ==
        doctest::Approx(0.6).epsilon(1e-12));

  SUBCASE("zero variance is undefined, not zero") {
    const auto r = pearson_correlation(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3});
    CHECK_FALSE(r.r.has_value());
    CHECK(r.n == 3);
  }
  SUBCASE("missing pairs are dropped") {
    std::vector<std::optional<double>> x{1, 2, std::nullopt, 3, 4};
    std::vector<std::optional<double>> y{2, 1, 100, 4, 3};
    const auto r = pearson_correlation(std::span<const std::optional<double>>(x), std::span<const std::optional<double>>(y));
    CHECK(r.n == 4);
    CHECK(*r.r == doctest::Approx(0.6));
  }
  SUBCASE("errors") {
    CHECK(code_of([] { pearson_correlation(std::vector<double>{1}, std::vector<double>{1}); }) == ErrorCode::InsufficientData);
    CHECK(code_of([] { pearson_correlation(std::vector<double>{1, 2}, std::vector<double>{1}); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { pearson_correlation(std::vector<double>{1, NAN}, std::vector<double>{1, 2}); }) ==
          ErrorCode::NonFiniteValue);
  }
  SUBCASE("symmetric and invariant under positive affine maps") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(-5, 5), a(0.1, 10);
    for (int t = 0; t < 200; ++t) {
      std::vector<double> x(12), y(12);
      for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = u(rng);
        y[i] = 0.5 * x[i] + u(rng);
      }
      const double rxy = *pearson_correlation(x, y).r;
      CHECK(rxy == doctest::Approx(*pearson_correlation(y, x).r).epsilon(1e-12));
      const double scale = a(rng), shift = u(rng);
      std::vector<double> x2(x);
      for (auto& v : x2) v = scale * v + shift;
      CHECK(rxy == doctest::Approx(*pearson_correlation(x2, y).r).epsilon(1e-9));
      CHECK(std::abs(rxy) <= 1.0);
    }
  }
}

TEST_CASE("min_max_normalize") {
  CHECK(min_max_normalize(std::vector<double>{10, 20, 30}) == std::vector<double>{0, 0.5, 1});
  CHECK(min_max_normalize(std::vector<double>{5, 5}) == std::vector<double>{0, 0});
  CHECK(min_max_normalize(std::vector<double>{-1, 0, 1}) == std::vector<double>{0, 0.5, 1});
  CHECK(code_of([] { min_max_normalize(std::vector<double>{}); }) == ErrorCode::EmptySeries);
}

TEST_CASE("detect_scale_disparity") {
  auto d = detect_scale_disparity({{"A", {1e98, -1e99}}, {"B", {1.0, 0.5}}});
  CHECK(d.disparate);
  CHECK(d.pairs.size() == 1);

  CHECK_FALSE(detect_scale_disparity({{"A", {0.1, 0.9}}, {"B", {0.0, 1.0}}}).disparate);

  d = detect_scale_disparity({{"A", {1}}, {"B", {999}}, {"C", {1001}}}, 1e3);
  CHECK(d.disparate);
  REQUIRE(d.pairs.size() == 1);
  CHECK(d.pairs[0] == std::pair<std::string, std::string>{"A", "C"});

  CHECK_FALSE(detect_scale_disparity({{"A", {0.0, 0.0}}, {"B", {1e9}}}).disparate);
  CHECK(code_of([] { detect_scale_disparity({{"A", {1}}}); }) == ErrorCode::InsufficientData);
}

TEST_CASE("generate_report") {
  const Study bracket = load_study_file(testing::fixture("bracket_study.json"));
  const auto req = classify("Please generate a history plot to check convergence.", bracket);
  const auto report = generate_report(bracket, req);
  REQUIRE(report.convergence.size() == 1);
  CHECK(report.convergence[0].converged);
  CHECK(report.feasible_count == bracket.designs.size());
  CHECK(report.infeasible_count == 0);
  REQUIRE(report.best_for("Mass") != nullptr);
  CHECK(report.best_for("Mass")->design_id == best_design(bracket, "Mass", false).design_id);
  CHECK(report.rendered_text.find("converged") != std::string::npos);
  CHECK(report.rendered_text == render_report_text(report));

  SUBCASE("three numeric columns give three correlations") {
    const Study battery = load_study_file(testing::fixture("battery_study.json"));
    const auto rel = classify("2d relation plot with variables total mass, first torsional frequency and total cost", battery);
    const auto r = generate_report(battery, rel);
    CHECK(r.correlations.size() == 3);
    CHECK(r.feasible_count == 11);
    CHECK(r.infeasible_count == 9);
    const auto again = generate_report(battery, rel);
    CHECK(again.rendered_text == r.rendered_text);
    CHECK(report_from_json(report_to_json(r)) == r);
  }
  SUBCASE("section order is stable") {
    const std::string& t = report.rendered_text;
    const auto conv = t.find("Convergence"), best = t.find("Best designs"), feas = t.find("Feasibility"),
               scale = t.find("Scale"), corr = t.find("Correlations");
    CHECK(conv < best);
    CHECK(best < feas);
    CHECK(feas < scale);
    CHECK(scale < corr);
  }
  SUBCASE("unknown requested column") {
    ClassifiedRequest bad = req;
    bad.columns = {"Ghost"};
    CHECK(code_of([&] { generate_report(bracket, bad); }) == ErrorCode::UnknownColumn);
  }
}
