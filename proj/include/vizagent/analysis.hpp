#pragma once

#include "vizagent/router.hpp"
#include "vizagent/study.hpp"

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace vizagent {

inline constexpr double kDefaultScaleRatio = 1e3;

// Trailing-window convergence criterion. The criterion is scale-equivariant
// only when abs_floor is scaled with the data; the default floor is absolute
// and matters only for series whose window magnitude is ~0.
struct ConvergenceParams {
  std::size_t window = 10;
  double rel_tol = 0.01;
  double abs_floor = 1e-12;

  void validate() const;
};

struct ConvergenceStatus {
  std::string column;
  bool converged = false;
  std::size_t window_used = 0;
  // (max - min) / max(max|v|, abs_floor) over the trailing min(len, window) values.
  double rel_range = 0.0;

  bool operator==(const ConvergenceStatus&) const = default;
};

struct BestDesign {
  std::string objective;
  DesignId design_id = 0;
  double value = 0.0;
  bool feasible_only = false;

  bool operator==(const BestDesign&) const = default;
};

struct CorrelationResult {
  std::string x;
  std::string y;
  std::optional<double> r;  // nullopt: undefined (zero variance on a side)
  std::size_t n = 0;

  bool operator==(const CorrelationResult&) const = default;
};

struct NamedSeries {
  std::string name;
  std::vector<double> values;
};

struct ScaleDisparity {
  bool disparate = false;
  std::vector<std::pair<std::string, std::string>> pairs;

  bool operator==(const ScaleDisparity&) const = default;
};

struct ColumnSummary {
  std::string name;
  ColumnRole role = ColumnRole::Variable;
  bool numeric = true;
  std::optional<double> min;
  std::optional<double> max;
  std::size_t missing = 0;

  bool operator==(const ColumnSummary&) const = default;
};

struct AnalysisReport {
  std::string study_id;
  RequestClass request_class = RequestClass::Unsupported;
  std::vector<std::string> requested_columns;
  std::vector<ColumnSummary> columns;  // every study column, declaration order
  std::vector<ConvergenceStatus> convergence;
  std::vector<BestDesign> best_designs;
  std::size_t feasible_count = 0;
  std::size_t infeasible_count = 0;
  ScaleDisparity scale;
  double scale_ratio = kDefaultScaleRatio;
  std::vector<CorrelationResult> correlations;
  std::vector<std::string> notes;
  std::string rendered_text;

  bool operator==(const AnalysisReport&) const = default;

  const ConvergenceStatus* convergence_for(std::string_view column) const;
  const ColumnSummary* column(std::string_view name) const;
  // Best design for an objective, preferring the feasible-only entry.
  const BestDesign* best_for(std::string_view objective) const;
  const CorrelationResult* correlation_for(std::string_view a, std::string_view b) const;
};

ConvergenceStatus assess_convergence(std::span<const double> series, const ConvergenceParams& params);

std::vector<double> running_best(std::span<const double> series, Direction direction);

BestDesign best_design(const Study& study, std::string_view objective, bool feasible_only);

// Pairs where either side is missing are dropped before the coefficient is formed.
CorrelationResult pearson_correlation(std::span<const std::optional<double>> x,
                                      std::span<const std::optional<double>> y);
CorrelationResult pearson_correlation(std::span<const double> x, std::span<const double> y);

std::vector<double> min_max_normalize(std::span<const double> series);

// Series whose max |v| is zero carry no magnitude and are never flagged.
ScaleDisparity detect_scale_disparity(const std::vector<NamedSeries>& series,
                                      double ratio_threshold = kDefaultScaleRatio);

struct ReportOptions {
  ConvergenceParams convergence;
  double scale_ratio = kDefaultScaleRatio;
};

AnalysisReport generate_report(const Study& study, const ClassifiedRequest& request,
                               const ReportOptions& options = {});

// Stable section order: Convergence, Best designs, Feasibility, Scale, Correlations.
std::string render_report_text(const AnalysisReport& report);

nlohmann::json report_to_json(const AnalysisReport& report);
AnalysisReport report_from_json(const nlohmann::json& j);

}  // namespace vizagent
