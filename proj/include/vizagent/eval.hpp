#pragma once

#include "vizagent/gateway.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace vizagent {

enum class SystemKind { Proposed, Baseline };
enum class Metric { Validity, Correctness, OutputQuality };

std::string_view to_string(SystemKind s) noexcept;
std::string_view to_string(Metric m) noexcept;
std::optional<SystemKind> system_from_string(std::string_view s) noexcept;
std::optional<Metric> metric_from_string(std::string_view s) noexcept;

struct RubricScore {
  std::string scenario;
  std::string assessor;
  SystemKind system = SystemKind::Proposed;
  int validity = 0;            // 0|1
  int efficiency = 0;          // 0|1
  int documentation = 0;       // 0|1
  int exception_handling = 0;  // 0|1
  int cleanliness = 0;         // 0|1
  int output_quality = 0;      // 0..3

  bool operator==(const RubricScore&) const = default;

  int correctness_total() const noexcept { return efficiency + documentation + exception_handling + cleanliness; }
  int metric(Metric m) const noexcept;
  // Throws ScoreParseError naming the first out-of-range field.
  void validate() const;
};

struct AggregateStats {
  double mean = 0.0;
  std::optional<double> sd;  // sample (n - 1); undefined for n = 1
  int mode = 0;              // ties go to the smallest value
  std::size_t n = 0;

  bool operator==(const AggregateStats&) const = default;
};

AggregateStats aggregate(std::span<const int> scores);

struct Improvement {
  double percent = 0.0;
  long rounded = 0;  // nearest integer percent, halves away from zero
};

Improvement improvement(double proposed_mean, double baseline_mean);

struct ScenarioTable {
  using Key = std::tuple<SystemKind, Metric, std::string>;
  std::map<Key, AggregateStats> cells;
  std::vector<std::string> scenarios;  // sorted

  const AggregateStats* cell(SystemKind s, Metric m, const std::string& scenario) const;
  // Unweighted mean of the available scenario means; nullopt when no cell exists.
  std::optional<double> summary(SystemKind s, Metric m) const;
};

ScenarioTable scenario_table(std::span<const RubricScore> scores);

// Pre-aggregated scenario means, one per (system, metric, scenario).
struct ScenarioMean {
  SystemKind system = SystemKind::Proposed;
  Metric metric = Metric::OutputQuality;
  std::string scenario;
  double mean = 0.0;
};

double summary_of_means(std::span<const double> means);

// Lines either RubricScore objects or {system, metric, scenario, mean} objects.
std::vector<RubricScore> parse_scores_jsonl(std::string_view text);
std::vector<ScenarioMean> parse_scenario_means_jsonl(std::string_view text);
bool looks_like_scenario_means(std::string_view text);

// Mean values are shown at 2 decimals and improvements are measured against
// those displayed means, so the report agrees with its own table.
std::string format_table_text(const ScenarioTable& table);
std::string format_table_csv(const ScenarioTable& table);
std::string format_means_report(std::span<const ScenarioMean> means);

std::string default_rubric_prompt();

struct AssessorRequest {
  std::string scenario;
  std::string assessor = "ai";
  SystemKind system = SystemKind::Proposed;
  std::string artifact;  // spec or code under review
};

// Sends the rubric through the gateway and parses the ```score block.
RubricScore ai_assessor_score(const AssessorRequest& request, const std::string& rubric_prompt, const LlmGateway& gateway,
                              const MockResponder& mock = {});

// Parses a ```score fenced JSON block from assessor output.
RubricScore parse_score_block(std::string_view text, const AssessorRequest& request);

// Mock assessor: validity 1 when the artifact parses as a plot spec, output quality
// 3 minus error-severity violations (floor 0); needs the report to check guidelines.
std::string mock_assessor_response(const std::string& artifact, const AnalysisReport& report);

}  // namespace vizagent
