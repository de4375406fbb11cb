#include "vizagent/plotspec.hpp"

#include "vizagent/error.hpp"
#include "vizagent/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <set>

namespace vizagent {

using nlohmann::json;

const std::vector<std::string>& palette_keys() {
  static const std::vector<std::string> keys = {"blue", "orange", "green", "red", "purple",
                                                "gray", "gold", "teal", "black"};
  return keys;
}

std::vector<std::string> PlotSpec::referenced_columns() const {
  std::vector<std::string> out;
  auto add = [&](const std::string& c) {
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
  };
  for (const auto& s : series) for (const auto& c : s.columns) add(c);
  for (const auto& a : axes) if (a.column) add(*a.column);
  for (const auto& c : parallel_axes) add(c);
  for (const auto& a : annotations) for (const auto& c : a.columns) add(c);
  if (color_by && *color_by != kFeasibilityColoring) add(*color_by);
  return out;
}

namespace {

std::string_view style_name(LineStyle s) { return s == LineStyle::Solid ? "solid" : "dashed"; }
std::string_view role_name(SeriesRole r) { return r == SeriesRole::Data ? "data" : "running_best"; }
std::string_view side_name(AxisSide s) {
  switch (s) {
    case AxisSide::Left: return "left";
    case AxisSide::Right: return "right";
    case AxisSide::Bottom: return "bottom";
  }
  return "left";
}
std::string_view annotation_name(AnnotationKind k) {
  switch (k) {
    case AnnotationKind::BestDesign: return "best_design";
    case AnnotationKind::Text: return "text";
    case AnnotationKind::Correlation: return "correlation";
  }
  return "text";
}

const std::set<std::string>& positions() {
  static const std::set<std::string> p = {"auto", "top_left", "top_right", "bottom_left", "bottom_right"};
  return p;
}

[[noreturn]] void parse_fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::SpecParseError, "at " + (path.empty() ? std::string("/") : path) + ": " + what);
}

const json& field(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) parse_fail(path + "/" + key, "missing field");
  return *it;
}

std::string string_field(const json& obj, const char* key, const std::string& path, std::optional<std::string> fallback = {}) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    if (fallback) return *fallback;
    parse_fail(path + "/" + key, "missing field");
  }
  if (!it->is_string()) parse_fail(path + "/" + key, "expected string");
  return it->get<std::string>();
}

std::vector<std::string> string_list(const json& obj, const char* key, const std::string& path, bool required) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    if (required) parse_fail(path + "/" + key, "missing field");
    return {};
  }
  if (!it->is_array()) parse_fail(path + "/" + key, "expected array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < it->size(); ++i) {
    if (!(*it)[i].is_string()) parse_fail(path + "/" + key + "/" + std::to_string(i), "expected string");
    out.push_back((*it)[i].get<std::string>());
  }
  return out;
}

template <typename Enum>
Enum enum_field(const json& obj, const char* key, const std::string& path, Enum fallback,
                std::initializer_list<std::pair<std::string_view, Enum>> table) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  if (!it->is_string()) parse_fail(path + "/" + key, "expected string");
  const auto s = it->get<std::string>();
  for (const auto& [name, value] : table) {
    if (name == s) return value;
  }
  parse_fail(path + "/" + key, "unexpected value '" + s + "'");
}

}  // namespace

PlotSpec plotspec_from_json(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SpecParseError, "at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!j.is_object()) parse_fail("", "expected a JSON object");

  PlotSpec spec;
  const auto kind = request_class_from_string(string_field(j, "kind", ""));
  if (!kind) parse_fail("/kind", "unknown plot kind");
  spec.kind = *kind;
  spec.title = string_field(j, "title", "", std::string());

  const json& series = field(j, "series", "");
  if (!series.is_array()) parse_fail("/series", "expected array");
  for (std::size_t i = 0; i < series.size(); ++i) {
    const std::string p = "/series/" + std::to_string(i);
    const json& s = series[i];
    if (!s.is_object()) parse_fail(p, "expected object");
    Series out;
    out.name = string_field(s, "name", p);
    out.columns = string_list(s, "columns", p, true);
    out.style = enum_field(s, "style", p, LineStyle::Solid, {{"solid", LineStyle::Solid}, {"dashed", LineStyle::Dashed}});
    out.color = string_field(s, "color", p, std::string("blue"));
    out.role = enum_field(s, "role", p, SeriesRole::Data, {{"data", SeriesRole::Data}, {"running_best", SeriesRole::RunningBest}});
    out.axis = enum_field(s, "axis", p, AxisSide::Left,
                          {{"left", AxisSide::Left}, {"right", AxisSide::Right}, {"bottom", AxisSide::Bottom}});
    spec.series.push_back(std::move(out));
  }

  if (auto it = j.find("axes"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) parse_fail("/axes", "expected array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string p = "/axes/" + std::to_string(i);
      const json& a = (*it)[i];
      if (!a.is_object()) parse_fail(p, "expected object");
      Axis axis;
      axis.label = string_field(a, "label", p, std::string());
      if (auto c = a.find("column"); c != a.end() && !c->is_null()) {
        if (!c->is_string()) parse_fail(p + "/column", "expected string");
        axis.column = c->get<std::string>();
      }
      if (auto n = a.find("normalized"); n != a.end()) {
        if (!n->is_boolean()) parse_fail(p + "/normalized", "expected boolean");
        axis.normalized = n->get<bool>();
      }
      axis.side = enum_field(a, "side", p, AxisSide::Left,
                             {{"left", AxisSide::Left}, {"right", AxisSide::Right}, {"bottom", AxisSide::Bottom}});
      spec.axes.push_back(std::move(axis));
    }
  }

  if (auto it = j.find("annotations"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) parse_fail("/annotations", "expected array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string p = "/annotations/" + std::to_string(i);
      const json& a = (*it)[i];
      if (!a.is_object()) parse_fail(p, "expected object");
      Annotation ann;
      ann.kind = enum_field(a, "kind", p, AnnotationKind::Text,
                            {{"best_design", AnnotationKind::BestDesign},
                             {"text", AnnotationKind::Text},
                             {"correlation", AnnotationKind::Correlation}});
      if (auto d = a.find("design_id"); d != a.end() && !d->is_null()) {
        if (!d->is_number_unsigned()) parse_fail(p + "/design_id", "expected non-negative integer");
        ann.design_id = d->get<DesignId>();
      }
      ann.text = string_field(a, "text", p, std::string());
      ann.position = string_field(a, "position", p, std::string("auto"));
      ann.columns = string_list(a, "columns", p, false);
      if (auto v = a.find("value"); v != a.end() && !v->is_null()) {
        if (!v->is_number()) parse_fail(p + "/value", "expected number");
        ann.value = v->get<double>();
      }
      spec.annotations.push_back(std::move(ann));
    }
  }

  if (auto it = j.find("legend"); it != j.end() && !it->is_null()) {
    if (!it->is_boolean()) parse_fail("/legend", "expected boolean");
    spec.legend = it->get<bool>();
  } else {
    spec.legend = false;
  }
  spec.parallel_axes = string_list(j, "parallel_axes", "", false);
  if (auto it = j.find("color_by"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) parse_fail("/color_by", "expected string");
    spec.color_by = it->get<std::string>();
  }

  validate_plotspec(spec);
  return spec;
}

std::string plotspec_to_json(const PlotSpec& spec) {
  json j;
  j["kind"] = std::string(to_string(spec.kind));
  j["title"] = spec.title;
  json series = json::array();
  for (const auto& s : spec.series) {
    series.push_back({{"name", s.name},
                      {"columns", s.columns},
                      {"style", std::string(style_name(s.style))},
                      {"color", s.color},
                      {"role", std::string(role_name(s.role))},
                      {"axis", std::string(side_name(s.axis))}});
  }
  j["series"] = std::move(series);
  json axes = json::array();
  for (const auto& a : spec.axes) {
    json aj{{"label", a.label}, {"normalized", a.normalized}, {"side", std::string(side_name(a.side))}};
    if (a.column) aj["column"] = *a.column;
    axes.push_back(std::move(aj));
  }
  j["axes"] = std::move(axes);
  json anns = json::array();
  for (const auto& a : spec.annotations) {
    json aj{{"kind", std::string(annotation_name(a.kind))}, {"text", a.text}, {"position", a.position}, {"columns", a.columns}};
    if (a.design_id) aj["design_id"] = *a.design_id;
    if (a.value) aj["value"] = *a.value;
    anns.push_back(std::move(aj));
  }
  j["annotations"] = std::move(anns);
  j["legend"] = spec.legend;
  j["parallel_axes"] = spec.parallel_axes;
  j["color_by"] = spec.color_by ? json(*spec.color_by) : json(nullptr);
  return j.dump(2);
}

std::string fence_plotspec(const PlotSpec& spec) { return "```plotspec\n" + plotspec_to_json(spec) + "\n```\n"; }

void validate_plotspec(const PlotSpec& spec) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::SpecInvariantError, what); };
  if (spec.kind == RequestClass::Unsupported) fail("kind must be a supported plot kind");
  if (spec.series.empty()) fail("at least one series is required");
  const auto& palette = palette_keys();
  std::size_t data_series = 0;
  for (std::size_t i = 0; i < spec.series.size(); ++i) {
    const auto& s = spec.series[i];
    const std::string at = "series[" + std::to_string(i) + "]";
    if (s.name.empty()) fail(at + ": name is empty");
    if (s.columns.empty()) fail(at + ": no columns");
    if (std::find(palette.begin(), palette.end(), s.color) == palette.end()) fail(at + ": color '" + s.color + "' is not a palette key");
    if (s.role == SeriesRole::Data) ++data_series;
    switch (spec.kind) {
      case RequestClass::HistoryPlot:
        if (s.columns.size() != 1) fail(at + ": history series take exactly one column");
        if (s.axis == AxisSide::Bottom) fail(at + ": history series must use the left or right axis");
        break;
      case RequestClass::Relation2D:
        if (s.role == SeriesRole::Data && s.columns.size() != 2) fail(at + ": relation series take [x, y] columns");
        break;
      default:
        break;
    }
  }
  if (data_series == 0) fail("at least one data series is required");
  if (spec.kind == RequestClass::Relation2D && spec.axes.size() != 2) fail("relation plots need exactly 2 axes");
  if (spec.kind == RequestClass::ParallelPlot) {
    if (spec.parallel_axes.size() < 3) fail("parallel plots need at least 3 axes");
    std::set<std::string> unique(spec.parallel_axes.begin(), spec.parallel_axes.end());
    if (unique.size() != spec.parallel_axes.size()) fail("parallel axes must be distinct");
    if (!spec.axes.empty() && spec.axes.size() != spec.parallel_axes.size()) {
      fail("parallel plots declare either no axes or one axis per parallel column");
    }
    for (std::size_t i = 0; i < spec.axes.size(); ++i) {
      if (spec.axes[i].column && *spec.axes[i].column != spec.parallel_axes[i]) {
        fail("axes[" + std::to_string(i) + "] does not match parallel_axes[" + std::to_string(i) + "]");
      }
    }
  }
  for (std::size_t i = 0; i < spec.annotations.size(); ++i) {
    const auto& a = spec.annotations[i];
    const std::string at = "annotations[" + std::to_string(i) + "]";
    if (a.kind == AnnotationKind::BestDesign && !a.design_id) fail(at + ": best_design needs a design_id");
    if (a.kind == AnnotationKind::Correlation && a.columns.size() != 2) fail(at + ": correlation needs two columns");
    if (a.kind == AnnotationKind::Text && a.text.empty()) fail(at + ": text annotation is empty");
    if (!positions().count(a.position)) fail(at + ": unknown position '" + a.position + "'");
  }
  if (spec.color_by && spec.color_by->empty()) fail("color_by is empty");
}

ParsedOutput parse_llm_output(std::string_view text) {
  struct Block {
    std::string body;
  };
  std::vector<Block> blocks;
  const auto lines = split(text, '\n');
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string line = trim(lines[i]);
    if (line.rfind("```", 0) != 0) continue;
    const bool is_spec = to_lower(trim(line.substr(3))) == "plotspec";
    std::string body;
    std::size_t j = i + 1;
    for (; j < lines.size(); ++j) {
      if (trim(lines[j]) == "```") break;
      body += lines[j] + "\n";
    }
    if (is_spec) blocks.push_back({std::move(body)});
    i = j;
  }
  if (blocks.empty()) throw Error(ErrorCode::NoSpecBlock, "no ```plotspec fenced block in the model output");
  ParsedOutput out;
  out.spec = plotspec_from_json(blocks.front().body);
  for (std::size_t k = 1; k < blocks.size(); ++k) {
    out.warnings.push_back("ignored additional plotspec block #" + std::to_string(k + 1));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Guideline checks

namespace {

class Checker {
 public:
  Checker(const PlotSpec& spec, const AnalysisReport& report, const GuidelineSet& guidelines)
      : spec_(spec), report_(report), guidelines_(guidelines) {}

  std::vector<Violation> run() {
    for (const auto& col : spec_.referenced_columns()) {
      if (!report_.column(col)) {
        throw Error(ErrorCode::ReportMismatch, "spec references column '" + col + "' that the analysis report does not cover");
      }
    }
    for (const auto& rule : guidelines_.rules) check(rule);
    return std::move(out_);
  }

 private:
  void flag(const GuidelineRule& rule, std::string message, std::string element) {
    out_.push_back({rule.id, rule.severity, std::move(message), std::move(element)});
  }

  std::vector<std::size_t> data_series() const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < spec_.series.size(); ++i) {
      if (spec_.series[i].role == SeriesRole::Data) idx.push_back(i);
    }
    return idx;
  }

  double magnitude(const std::string& column) const {
    const auto* c = report_.column(column);
    if (!c || !c->numeric || !c->min) return 0.0;
    return std::max(std::abs(*c->min), std::abs(*c->max));
  }

  bool disparate(const std::string& a, const std::string& b) const {
    const double ma = magnitude(a);
    const double mb = magnitude(b);
    if (ma <= 0.0 || mb <= 0.0) return false;
    return std::max(ma, mb) / std::min(ma, mb) > report_.scale_ratio;
  }

  bool is_report_best(DesignId id) const {
    return std::any_of(report_.best_designs.begin(), report_.best_designs.end(),
                       [&](const BestDesign& b) { return b.design_id == id; });
  }

  // Shared by H1, R3 and P2.
  void check_best_marker(const GuidelineRule& rule) {
    bool found = false;
    for (std::size_t i = 0; i < spec_.annotations.size(); ++i) {
      const auto& a = spec_.annotations[i];
      if (a.kind != AnnotationKind::BestDesign) continue;
      found = true;
      if (!is_report_best(*a.design_id)) {
        flag(rule, "design " + std::to_string(*a.design_id) + " is marked as best but is not a best design in the report",
             "annotations[" + std::to_string(i) + "]");
      }
    }
    if (!found) flag(rule, "no best-design annotation", "annotations");
  }

  void check_legend(const GuidelineRule& rule) {
    if (!spec_.legend) flag(rule, "legend is disabled", "legend");
  }

  const Axis* axis_on(AxisSide side) const {
    for (const auto& a : spec_.axes) {
      if (a.side == side) return &a;
    }
    return nullptr;
  }

  void check(const GuidelineRule& rule) {
    const std::string& id = rule.id;
    switch (spec_.kind) {
      case RequestClass::HistoryPlot: check_history(rule, id); break;
      case RequestClass::Relation2D: check_relation(rule, id); break;
      case RequestClass::ParallelPlot: check_parallel(rule, id); break;
      case RequestClass::Unsupported: break;
    }
  }

  void check_history(const GuidelineRule& rule, const std::string& id) {
    const auto data = data_series();
    if (id == "H1") {
      check_best_marker(rule);
    } else if (id == "H2") {
      if (data.size() > 2) {
        flag(rule, std::to_string(data.size()) + " data series plotted; at most 2 allowed", "series");
      }
    } else if (id == "H3") {
      for (auto i : data) {
        const auto& s = spec_.series[i];
        const auto* conv = report_.convergence_for(s.columns.front());
        if (!conv) continue;
        const LineStyle expected = conv->converged ? LineStyle::Solid : LineStyle::Dashed;
        if (s.style != expected) {
          flag(rule, "'" + s.columns.front() + "' is " + (conv->converged ? "converged" : "not converged") +
                         " but drawn " + std::string(style_name(s.style)),
               "series[" + std::to_string(i) + "]");
        }
      }
    } else if (id == "H4") {
      for (auto i : data) {
        const auto& s = spec_.series[i];
        if (!axis_on(s.axis)) {
          flag(rule, "'" + s.name + "' uses the " + std::string(side_name(s.axis)) + " axis but no such axis is declared",
               "series[" + std::to_string(i) + "]");
        }
      }
      if (data.size() == 2) {
        const auto& a = spec_.series[data[0]];
        const auto& b = spec_.series[data[1]];
        const Axis* shared = axis_on(a.axis);
        if (a.axis == b.axis && disparate(a.columns.front(), b.columns.front()) && !(shared && shared->normalized)) {
          flag(rule, "'" + a.columns.front() + "' and '" + b.columns.front() +
                         "' differ in scale but share one unnormalized axis; use dual Y-axes",
               "series");
        }
      }
    } else if (id == "H5") {
      for (auto i : data) {
        const auto& col = spec_.series[i].columns.front();
        const bool has_best = std::any_of(spec_.series.begin(), spec_.series.end(), [&](const Series& s) {
          return s.role == SeriesRole::RunningBest && s.columns.front() == col;
        });
        if (!has_best) flag(rule, "no running-best history for '" + col + "'", "series[" + std::to_string(i) + "]");
      }
    } else if (id == "H6") {
      check_legend(rule);
    }
  }

  void check_relation(const GuidelineRule& rule, const std::string& id) {
    const auto data = data_series();
    if (id == "R1") {
      std::set<std::string> reported;
      auto check_col = [&](const std::string& col, const std::string& element) {
        const auto* c = report_.column(col);
        if (c && !c->numeric && reported.insert(col).second) {
          flag(rule, "categorical column '" + col + "' placed on a continuous axis", element);
        }
      };
      for (auto i : data) {
        for (const auto& col : spec_.series[i].columns) check_col(col, "series[" + std::to_string(i) + "]");
      }
      for (std::size_t i = 0; i < spec_.axes.size(); ++i) {
        if (spec_.axes[i].column) check_col(*spec_.axes[i].column, "axes[" + std::to_string(i) + "]");
      }
    } else if (id == "R2") {
      if (!spec_.color_by) flag(rule, "color does not encode any study dimension", "color_by");
    } else if (id == "R3") {
      check_best_marker(rule);
    } else if (id == "R4") {
      if (data.empty()) return;
      const auto& cols = spec_.series[data.front()].columns;
      const auto* corr = report_.correlation_for(cols[0], cols[1]);
      const bool defined = corr && corr->r;
      const Annotation* ann = nullptr;
      std::size_t ann_idx = 0;
      for (std::size_t i = 0; i < spec_.annotations.size(); ++i) {
        const auto& a = spec_.annotations[i];
        if (a.kind == AnnotationKind::Correlation &&
            ((a.columns[0] == cols[0] && a.columns[1] == cols[1]) || (a.columns[0] == cols[1] && a.columns[1] == cols[0]))) {
          ann = &a;
          ann_idx = i;
          break;
        }
      }
      if (defined && !ann) {
        flag(rule, "correlation r = " + format_fixed(*corr->r, 2) + " is not annotated", "annotations");
      } else if (!defined && ann) {
        flag(rule, "annotated correlation is undefined in the report", "annotations[" + std::to_string(ann_idx) + "]");
      } else if (defined && ann && ann->value && std::abs(*ann->value - *corr->r) > 0.005) {
        flag(rule, "annotated r = " + format_fixed(*ann->value, 2) + " differs from the report (" + format_fixed(*corr->r, 2) + ")",
             "annotations[" + std::to_string(ann_idx) + "]");
      }
    } else if (id == "R5") {
      check_legend(rule);
    }
  }

  void check_parallel(const GuidelineRule& rule, const std::string& id) {
    if (id == "P1") {
      std::vector<std::string> numeric;
      for (const auto& c : spec_.parallel_axes) {
        const auto* info = report_.column(c);
        if (info && info->numeric) numeric.push_back(c);
      }
      bool any = false;
      for (std::size_t i = 0; i < numeric.size() && !any; ++i) {
        for (std::size_t j = i + 1; j < numeric.size() && !any; ++j) any = disparate(numeric[i], numeric[j]);
      }
      if (!any) return;
      for (std::size_t i = 0; i < spec_.parallel_axes.size(); ++i) {
        const auto* info = report_.column(spec_.parallel_axes[i]);
        if (!info || !info->numeric) continue;
        const bool normalized = i < spec_.axes.size() && spec_.axes[i].normalized;
        if (!normalized) {
          flag(rule, "axis '" + spec_.parallel_axes[i] + "' is not normalized although the axes differ in scale",
               "axes[" + std::to_string(i) + "]");
        }
      }
    } else if (id == "P2") {
      check_best_marker(rule);
    } else if (id == "P3") {
      check_legend(rule);
    } else if (id == "P4") {
      if (report_.infeasible_count > 0 && spec_.color_by != std::optional<std::string>(std::string(kFeasibilityColoring))) {
        flag(rule, "the study has infeasible designs but color does not encode feasibility", "color_by");
      }
    }
  }

  const PlotSpec& spec_;
  const AnalysisReport& report_;
  const GuidelineSet& guidelines_;
  std::vector<Violation> out_;
};

// "H10" sorts after "H9".
bool rule_id_less(const std::string& a, const std::string& b) {
  auto split_id = [](const std::string& s) {
    std::size_t k = 0;
    while (k < s.size() && !std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
    const std::string digits = s.substr(k);
    long n = digits.empty() ? 0 : std::strtol(digits.c_str(), nullptr, 10);
    return std::make_pair(s.substr(0, k), n);
  };
  return split_id(a) < split_id(b);
}

}  // namespace

std::vector<Violation> check_guidelines(const PlotSpec& spec, const AnalysisReport& report, const GuidelineSet& guidelines) {
  if (spec.kind == RequestClass::Unsupported) throw Error(ErrorCode::UnsupportedKind, "cannot check an Unsupported spec");
  if (guidelines.kind != spec.kind) {
    throw Error(ErrorCode::InvalidArgument, "guideline set is for " + std::string(to_string(guidelines.kind)) +
                                                " but the spec is " + std::string(to_string(spec.kind)));
  }
  return Checker(spec, report, guidelines).run();
}

std::vector<Violation> check_guidelines(const PlotSpec& spec, const AnalysisReport& report) {
  return check_guidelines(spec, report, guidelines_for(spec.kind));
}

std::size_t count_errors(const std::vector<Violation>& violations) {
  return static_cast<std::size_t>(std::count_if(violations.begin(), violations.end(),
                                                [](const Violation& v) { return v.severity == Severity::Error; }));
}

std::string repair_prompt(const PlotSpec& spec, const std::vector<Violation>& violations, const GuidelineSet& guidelines) {
  if (violations.empty()) throw Error(ErrorCode::ContractError, "repair_prompt needs at least one violation");
  auto sorted = violations;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Violation& a, const Violation& b) { return rule_id_less(a.rule_id, b.rule_id); });
  std::string out = "Your previous " + std::string(to_string(spec.kind)) +
                    " spec broke these visualization rules. Return one corrected ```plotspec block.\n";
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& v = sorted[i];
    const auto* rule = guidelines.rule(v.rule_id);
    out += std::to_string(i + 1) + ". [" + v.rule_id + "] " + (rule ? rule->text : std::string("(rule text unavailable)")) +
           "\n   Problem: " + v.message + " (at " + v.element + ")\n";
  }
  return out;
}

}  // namespace vizagent
