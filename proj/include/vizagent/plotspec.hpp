#pragma once

#include "vizagent/analysis.hpp"
#include "vizagent/prompt.hpp"
#include "vizagent/router.hpp"
#include "vizagent/study.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vizagent {

enum class LineStyle { Solid, Dashed };
enum class SeriesRole { Data, RunningBest };
enum class AxisSide { Left, Right, Bottom };
enum class AnnotationKind { BestDesign, Text, Correlation };

inline constexpr std::string_view kFeasibilityColoring = "feasibility";

// Symbolic palette; the renderer owns the concrete colors.
const std::vector<std::string>& palette_keys();

struct Series {
  std::string name;
  // History: [y]. Relation: [x, y]. Parallel: the axis columns.
  std::vector<std::string> columns;
  LineStyle style = LineStyle::Solid;
  std::string color = "blue";
  SeriesRole role = SeriesRole::Data;
  AxisSide axis = AxisSide::Left;

  bool operator==(const Series&) const = default;
};

struct Axis {
  std::string label;
  std::optional<std::string> column;
  bool normalized = false;
  AxisSide side = AxisSide::Left;

  bool operator==(const Axis&) const = default;
};

struct Annotation {
  AnnotationKind kind = AnnotationKind::Text;
  std::optional<DesignId> design_id;       // best_design
  std::string text;                        // text, optional label otherwise
  std::string position = "auto";           // auto | top_left | top_right | bottom_left | bottom_right
  std::vector<std::string> columns;        // correlation: the two columns
  std::optional<double> value;             // correlation coefficient

  bool operator==(const Annotation&) const = default;
};

struct PlotSpec {
  RequestClass kind = RequestClass::HistoryPlot;
  std::string title;
  std::vector<Series> series;
  std::vector<Axis> axes;
  std::vector<Annotation> annotations;
  bool legend = true;
  std::vector<std::string> parallel_axes;
  std::optional<std::string> color_by;  // a column or "feasibility"

  bool operator==(const PlotSpec&) const = default;

  // Every column the spec refers to, first-appearance order.
  std::vector<std::string> referenced_columns() const;
};

struct Violation {
  std::string rule_id;
  Severity severity = Severity::Error;
  std::string message;
  std::string element;

  bool operator==(const Violation&) const = default;
};

// Structural invariants; throws SpecInvariantError. The history series bound
// (at most two) is a guideline, not an invariant, so H2 can report it.
void validate_plotspec(const PlotSpec& spec);

PlotSpec plotspec_from_json(std::string_view json_text);
std::string plotspec_to_json(const PlotSpec& spec);
// ```plotspec fenced block, the output contract the prompt asks for.
std::string fence_plotspec(const PlotSpec& spec);

struct ParsedOutput {
  PlotSpec spec;
  std::vector<std::string> warnings;
};

// First ```plotspec block wins; later ones are ignored with a warning.
ParsedOutput parse_llm_output(std::string_view text);

std::vector<Violation> check_guidelines(const PlotSpec& spec, const AnalysisReport& report,
                                        const GuidelineSet& guidelines);
std::vector<Violation> check_guidelines(const PlotSpec& spec, const AnalysisReport& report);

std::size_t count_errors(const std::vector<Violation>& violations);

inline constexpr int kCanvasWidth = 960;
inline constexpr int kCanvasHeight = 600;
inline constexpr int kCanvasMargin = 60;

std::string render_svg(const PlotSpec& spec, const Study& study);

// Numbered addendum for a single regeneration attempt; throws ContractError
// when there is nothing to repair.
std::string repair_prompt(const PlotSpec& spec, const std::vector<Violation>& violations,
                          const GuidelineSet& guidelines);

}  // namespace vizagent
