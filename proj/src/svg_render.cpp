#include "vizagent/error.hpp"
#include "vizagent/plotspec.hpp"
#include "vizagent/text.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

namespace vizagent {
namespace {

constexpr double kLeft = kCanvasMargin;
constexpr double kRight = kCanvasWidth - kCanvasMargin;
constexpr double kTop = kCanvasMargin;
constexpr double kBottom = kCanvasHeight - kCanvasMargin;
constexpr int kTicks = 5;
constexpr const char* kDash = "6,4";
constexpr const char* kBestColor = "#d4a017";
constexpr const char* kFeasibleColor = "#2ca02c";
constexpr const char* kInfeasibleColor = "#d62728";

const std::string& hex_color(const std::string& key) {
  static const std::map<std::string, std::string> colors = {
      {"blue", "#1f77b4"}, {"orange", "#ff7f0e"}, {"green", "#2ca02c"}, {"red", "#d62728"},
      {"purple", "#9467bd"}, {"gray", "#7f7f7f"}, {"gold", "#d4a017"}, {"teal", "#17becf"},
      {"black", "#222222"}};
  static const std::string fallback = "#222222";
  auto it = colors.find(key);
  return it == colors.end() ? fallback : it->second;
}

std::string n2(double v) { return format_fixed(v, 2); }

std::string escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = 0.0;
  double hi = 1.0;

  // Degenerate ranges are widened so the mapping stays finite.
  Range padded() const {
    if (hi > lo) return *this;
    const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
    return {lo - pad, hi + pad};
  }
  double fraction(double v) const {
    const Range r = padded();
    return (v - r.lo) / (r.hi - r.lo);
  }
  double at(double t) const {
    const Range r = padded();
    return r.lo + t * (r.hi - r.lo);
  }
};

Range range_of(const std::vector<double>& v) {
  const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
  return {*mn, *mx};
}

Range merge(const Range& a, const Range& b) { return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)}; }

double map_x(double t) { return kLeft + t * (kRight - kLeft); }
double map_y(double t) { return kBottom - t * (kBottom - kTop); }

class Svg {
 public:
  explicit Svg(const std::string& title) {
    out_ += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(kCanvasWidth) +
            "\" height=\"" + std::to_string(kCanvasHeight) + "\" viewBox=\"0 0 " + std::to_string(kCanvasWidth) + " " +
            std::to_string(kCanvasHeight) + "\" font-family=\"sans-serif\">\n";
    out_ += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(kCanvasWidth) + "\" height=\"" +
            std::to_string(kCanvasHeight) + "\" fill=\"#ffffff\"/>\n";
    if (!title.empty()) text(kCanvasWidth / 2.0, 35, title, "middle", 18, "title");
  }

  void line(double x1, double y1, double x2, double y2, const std::string& stroke, double width,
            const std::string& cls = {}, bool dashed = false) {
    out_ += "<line";
    if (!cls.empty()) out_ += " class=\"" + cls + "\"";
    out_ += " x1=\"" + n2(x1) + "\" y1=\"" + n2(y1) + "\" x2=\"" + n2(x2) + "\" y2=\"" + n2(y2) + "\" stroke=\"" + stroke +
            "\" stroke-width=\"" + n2(width) + "\"";
    if (dashed) out_ += std::string(" stroke-dasharray=\"") + kDash + "\"";
    out_ += "/>\n";
  }

  void text(double x, double y, const std::string& s, const char* anchor, int size, const std::string& cls = {},
            double rotate = 0.0) {
    out_ += "<text";
    if (!cls.empty()) out_ += " class=\"" + cls + "\"";
    out_ += " x=\"" + n2(x) + "\" y=\"" + n2(y) + "\" text-anchor=\"" + anchor + "\" font-size=\"" + std::to_string(size) + "\"";
    if (rotate != 0.0) out_ += " transform=\"rotate(" + n2(rotate) + " " + n2(x) + " " + n2(y) + ")\"";
    out_ += ">" + escape(s) + "</text>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& cls, const std::string& column,
                const std::string& stroke, double width, bool dashed, double opacity = 1.0) {
    out_ += "<polyline class=\"" + cls + "\"";
    if (!column.empty()) out_ += " data-column=\"" + escape(column) + "\"";
    out_ += " fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" + n2(width) + "\"";
    if (dashed) out_ += std::string(" stroke-dasharray=\"") + kDash + "\"";
    if (opacity < 1.0) out_ += " stroke-opacity=\"" + n2(opacity) + "\"";
    out_ += " points=\"";
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      for (int step = 0; step < 8; ++step) {
        const double t = step / 8.0;
        occupied_.emplace_back(pts[i].first + t * (pts[i + 1].first - pts[i].first),
                               pts[i].second + t * (pts[i + 1].second - pts[i].second));
      }
    }
    if (!pts.empty()) occupied_.push_back(pts.back());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i) out_ += ' ';
      out_ += n2(pts[i].first) + "," + n2(pts[i].second);
    }
    out_ += "\"/>\n";
  }

  void dot(double x, double y, const std::string& fill, const std::string& cls, DesignId id) {
    occupied_.emplace_back(x, y);
    out_ += "<circle class=\"" + cls + "\" data-design=\"" + std::to_string(id) + "\" cx=\"" + n2(x) + "\" cy=\"" + n2(y) +
            "\" r=\"4\" fill=\"" + fill + "\" fill-opacity=\"0.85\"/>\n";
  }

  void ring(double x, double y, DesignId id) {
    out_ += "<circle class=\"best-design\" data-design=\"" + std::to_string(id) + "\" cx=\"" + n2(x) + "\" cy=\"" + n2(y) +
            "\" r=\"9\" fill=\"none\" stroke=\"" + kBestColor + "\" stroke-width=\"3\"/>\n";
  }

  void raw(const std::string& s) { out_ += s; }

  // Data positions drawn so far; the legend avoids them.
  const std::vector<std::pair<double, double>>& occupied() const { return occupied_; }

  std::string finish() {
    out_ += "</svg>\n";
    return std::move(out_);
  }

 private:
  std::string out_;
  std::vector<std::pair<double, double>> occupied_;
};

struct LegendEntry {
  std::string label;
  std::string color;
  enum { Line, Dot, Ring } swatch = Line;
  bool dashed = false;
  double width = 1.5;
};

void draw_legend(Svg& svg, const std::vector<LegendEntry>& entries) {
  if (entries.empty()) return;
  std::size_t longest = 0;
  for (const auto& e : entries) longest = std::max(longest, e.label.size());
  const double w = 40.0 + 7.0 * static_cast<double>(longest);
  const double h = 10.0 + 18.0 * static_cast<double>(entries.size());
  // Corner with the fewest data points under the box; ties keep the earlier corner.
  const std::pair<double, double> corners[] = {{kRight - w - 10.0, kTop + 10.0},
                                               {kLeft + 10.0, kTop + 10.0},
                                               {kRight - w - 10.0, kBottom - h - 10.0},
                                               {kLeft + 10.0, kBottom - h - 10.0}};
  double x0 = corners[0].first;
  double y0 = corners[0].second;
  std::size_t fewest = std::numeric_limits<std::size_t>::max();
  for (const auto& [cx, cy] : corners) {
    const auto n = static_cast<std::size_t>(std::count_if(svg.occupied().begin(), svg.occupied().end(), [&](const auto& p) {
      return p.first >= cx - 6 && p.first <= cx + w + 6 && p.second >= cy - 6 && p.second <= cy + h + 6;
    }));
    if (n < fewest) {
      fewest = n;
      x0 = cx;
      y0 = cy;
    }
  }
  svg.raw("<g class=\"legend\">\n");
  svg.raw("<rect x=\"" + n2(x0) + "\" y=\"" + n2(y0) + "\" width=\"" + n2(w) + "\" height=\"" + n2(h) +
          "\" fill=\"#ffffff\" fill-opacity=\"0.9\" stroke=\"#999999\"/>\n");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    const double cy = y0 + 14.0 + 18.0 * static_cast<double>(i);
    switch (e.swatch) {
      case LegendEntry::Line: svg.line(x0 + 8, cy, x0 + 30, cy, e.color, e.width, {}, e.dashed); break;
      case LegendEntry::Dot:
        svg.raw("<circle cx=\"" + n2(x0 + 19) + "\" cy=\"" + n2(cy) + "\" r=\"4\" fill=\"" + e.color + "\"/>\n");
        break;
      case LegendEntry::Ring:
        svg.raw("<circle cx=\"" + n2(x0 + 19) + "\" cy=\"" + n2(cy) + "\" r=\"6\" fill=\"none\" stroke=\"" + e.color +
                "\" stroke-width=\"2\"/>\n");
        break;
    }
    svg.text(x0 + 36, cy + 4, e.label, "start", 12);
  }
  svg.raw("</g>\n");
}

std::pair<double, double> anchor_for(const std::string& position, std::size_t slot) {
  const double dy = 18.0 * static_cast<double>(slot);
  if (position == "top_right") return {kRight - 10, kTop + 20 + dy};
  if (position == "bottom_left") return {kLeft + 10, kBottom - 12 - dy};
  if (position == "bottom_right") return {kRight - 10, kBottom - 12 - dy};
  return {kLeft + 10, kTop + 20 + dy};
}

void draw_text_annotations(Svg& svg, const PlotSpec& spec) {
  std::map<std::string, std::size_t> slots;
  for (const auto& a : spec.annotations) {
    std::string s;
    if (a.kind == AnnotationKind::Text) {
      s = a.text;
    } else if (a.kind == AnnotationKind::Correlation) {
      s = !a.text.empty() ? a.text
                          : "r(" + a.columns[0] + ", " + a.columns[1] + ") = " + (a.value ? format_fixed(*a.value, 2) : "undefined");
    } else {
      continue;
    }
    const std::string pos = a.position == "auto" ? "top_left" : a.position;
    const auto [x, y] = anchor_for(pos, slots[pos]++);
    const bool right = pos == "top_right" || pos == "bottom_right";
    svg.text(x, y, s, right ? "end" : "start", 13, "annotation");
  }
}

// Vertical tick labels; a normalized axis keeps original-unit labels.
void draw_y_ticks(Svg& svg, double x, const Range& data, bool labels_right) {
  for (int i = 0; i < kTicks; ++i) {
    const double t = static_cast<double>(i) / (kTicks - 1);
    const double y = map_y(t);
    svg.line(x - 4, y, x + 4, y, "#333333", 1);
    svg.text(labels_right ? x + 8 : x - 8, y + 4, format_general(data.at(t), 4), labels_right ? "start" : "end", 11, "tick");
  }
}

void draw_x_ticks(Svg& svg, const Range& data) {
  for (int i = 0; i < kTicks; ++i) {
    const double t = static_cast<double>(i) / (kTicks - 1);
    const double x = map_x(t);
    svg.line(x, kBottom - 4, x, kBottom + 4, "#333333", 1);
    svg.text(x, kBottom + 18, format_general(data.at(t), 4), "middle", 11, "tick");
  }
}

const Axis* axis_for(const PlotSpec& spec, AxisSide side) {
  for (const auto& a : spec.axes) {
    if (a.side == side) return &a;
  }
  return nullptr;
}

std::string axis_label(const Axis* axis, const std::string& fallback) {
  if (!axis || axis->label.empty()) return axis && axis->column ? *axis->column : fallback;
  return axis->label;
}

NumericSeries require_series(const Study& study, const std::string& column) {
  if (!study.column(column)) throw Error(ErrorCode::UnknownColumn, "plot references unknown column '" + column + "'");
  auto s = numeric_series(study, column);
  if (s.values.empty()) throw Error(ErrorCode::EmptySeries, "column '" + column + "' has no values to plot");
  return s;
}

// ---------------------------------------------------------------------------

std::string render_history(const PlotSpec& spec, const Study& study) {
  struct Drawn {
    const Series* series;
    NumericSeries data;
    std::vector<double> values;  // running best applied where requested
  };
  std::vector<Drawn> drawn;
  for (const auto& s : spec.series) {
    Drawn d{&s, require_series(study, s.columns.front()), {}};
    if (s.role == SeriesRole::RunningBest) {
      const auto* obj = study.objective(s.columns.front());
      d.values = running_best(d.data.values, obj ? obj->direction : Direction::Minimize);
    } else {
      d.values = d.data.values;
    }
    drawn.push_back(std::move(d));
  }

  Range xr{static_cast<double>(study.designs.front().design_id), static_cast<double>(study.designs.back().design_id)};
  std::map<AxisSide, Range> side_range;
  for (const auto& d : drawn) {
    const Range r = range_of(d.values);
    auto it = side_range.find(d.series->axis);
    side_range[d.series->axis] = it == side_range.end() ? r : merge(it->second, r);
  }
  auto normalized = [&](AxisSide side) {
    const Axis* a = axis_for(spec, side);
    return a && a->normalized;
  };
  // On a normalized axis each column is scaled by its own data range.
  std::map<std::string, Range> column_range;
  for (const auto& d : drawn) column_range.emplace(d.series->columns.front(), range_of(d.data.values));

  auto y_fraction = [&](const Series& s, double v) {
    if (normalized(s.axis)) return column_range.at(s.columns.front()).fraction(v);
    return side_range.at(s.axis).fraction(v);
  };

  Svg svg(spec.title);
  svg.line(kLeft, kBottom, kRight, kBottom, "#333333", 1, "axis");
  draw_x_ticks(svg, xr);
  svg.text((kLeft + kRight) / 2, kBottom + 40, axis_label(axis_for(spec, AxisSide::Bottom), "Design ID"), "middle", 13, "axis-label");
  for (const auto& [side, range] : side_range) {
    if (side == AxisSide::Bottom) continue;
    const bool right = side == AxisSide::Right;
    const double x = right ? kRight : kLeft;
    svg.line(x, kTop, x, kBottom, "#333333", 1, "axis");
    const Axis* axis = axis_for(spec, side);
    std::string first_col;
    for (const auto& d : drawn) {
      if (d.series->axis == side) {
        first_col = d.series->columns.front();
        break;
      }
    }
    draw_y_ticks(svg, x, normalized(side) ? column_range.at(first_col) : range, right);
    const double lx = right ? kRight + 45 : kLeft - 45;
    svg.text(lx, (kTop + kBottom) / 2, axis_label(axis, first_col), "middle", 13, "axis-label", right ? 90 : -90);
  }

  for (const auto& d : drawn) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < d.values.size(); ++i) {
      pts.emplace_back(map_x(xr.fraction(static_cast<double>(d.data.ids[i]))), map_y(y_fraction(*d.series, d.values[i])));
    }
    const bool best = d.series->role == SeriesRole::RunningBest;
    svg.polyline(pts, best ? "running-best" : "data", d.series->columns.front(), hex_color(d.series->color), best ? 2.5 : 1.5,
                 d.series->style == LineStyle::Dashed, best ? 0.9 : 1.0);
  }

  std::size_t marker = 0;
  for (const auto& a : spec.annotations) {
    if (a.kind != AnnotationKind::BestDesign) continue;
    // Ring the marked design on the series named by the annotation, else on
    // the first data series that has a value there.
    const Drawn* target = nullptr;
    std::size_t index = 0;
    for (int pass = 0; pass < 2 && !target; ++pass) {
      for (const auto& d : drawn) {
        if (d.series->role != SeriesRole::Data) continue;
        const auto& col = d.series->columns.front();
        if (pass == 0 && std::find(a.columns.begin(), a.columns.end(), col) == a.columns.end()) continue;
        auto it = std::find(d.data.ids.begin(), d.data.ids.end(), *a.design_id);
        if (it == d.data.ids.end()) continue;
        target = &d;
        index = static_cast<std::size_t>(it - d.data.ids.begin());
        break;
      }
    }
    if (!target) continue;
    const double x = map_x(xr.fraction(static_cast<double>(*a.design_id)));
    const double y = map_y(y_fraction(*target->series, target->data.values[index]));
    svg.ring(x, y, *a.design_id);
    const double label_y = y < kTop + 40 ? y + 24 + 14.0 * static_cast<double>(marker) : y - 14 - 14.0 * static_cast<double>(marker);
    svg.text(std::clamp(x, kLeft + 60, kRight - 60), label_y,
             a.text.empty() ? "best #" + std::to_string(*a.design_id) : a.text, "middle", 11, "best-label");
    ++marker;
  }
  draw_text_annotations(svg, spec);

  if (spec.legend) {
    std::vector<LegendEntry> entries;
    for (const auto& s : spec.series) {
      const bool best = s.role == SeriesRole::RunningBest;
      entries.push_back({s.name, hex_color(s.color), LegendEntry::Line, s.style == LineStyle::Dashed, best ? 2.5 : 1.5});
    }
    if (std::any_of(spec.annotations.begin(), spec.annotations.end(),
                    [](const Annotation& a) { return a.kind == AnnotationKind::BestDesign; })) {
      entries.push_back({"Best design", kBestColor, LegendEntry::Ring});
    }
    draw_legend(svg, entries);
  }
  return svg.finish();
}

// Maps a value in [0, 1] onto a blue-to-orange ramp.
std::string ramp(double t) {
  t = std::clamp(t, 0.0, 1.0);
  auto channel = [&](int a, int b) { return static_cast<int>(std::lround(a + t * (b - a))); };
  const int r = channel(0x1f, 0xff), g = channel(0x77, 0x7f), b = channel(0xb4, 0x0e);
  static const char* digits = "0123456789abcdef";
  std::string out = "#";
  for (int c : {r, g, b}) {
    out += digits[(c >> 4) & 0xf];
    out += digits[c & 0xf];
  }
  return out;
}

struct ColorScheme {
  std::vector<LegendEntry> legend;
  std::function<std::string(const DesignRecord&)> color;
};

ColorScheme color_scheme(const PlotSpec& spec, const Study& study, const std::string& fallback) {
  ColorScheme scheme;
  if (!spec.color_by) {
    scheme.color = [fallback](const DesignRecord&) { return fallback; };
    return scheme;
  }
  const std::string& by = *spec.color_by;
  if (by == kFeasibilityColoring) {
    scheme.color = [&study](const DesignRecord& d) {
      return std::string(is_feasible(study, d.design_id) ? kFeasibleColor : kInfeasibleColor);
    };
    scheme.legend = {{"Feasible", kFeasibleColor, LegendEntry::Dot}, {"Infeasible", kInfeasibleColor, LegendEntry::Dot}};
    return scheme;
  }
  const auto info = study.column(by);
  if (!info) throw Error(ErrorCode::UnknownColumn, "color_by references unknown column '" + by + "'");
  if (info->numeric) {
    const auto s = require_series(study, by);
    const Range r = range_of(s.values);
    scheme.color = [by, r](const DesignRecord& d) {
      const auto it = d.values.find(by);
      if (it == d.values.end() || !std::holds_alternative<double>(it->second)) return std::string("#bbbbbb");
      return ramp(r.fraction(std::get<double>(it->second)));
    };
    scheme.legend = {{by + " low", ramp(0.0), LegendEntry::Dot}, {by + " high", ramp(1.0), LegendEntry::Dot}};
  } else {
    const auto* var = study.variable(by);
    const auto& palette = palette_keys();
    std::map<std::string, std::string> by_label;
    for (std::size_t i = 0; i < var->categories.size(); ++i) {
      by_label[var->categories[i]] = hex_color(palette[i % palette.size()]);
      scheme.legend.push_back({var->categories[i], by_label[var->categories[i]], LegendEntry::Dot});
    }
    scheme.color = [by, by_label](const DesignRecord& d) {
      const auto it = d.values.find(by);
      if (it == d.values.end() || !std::holds_alternative<std::string>(it->second)) return std::string("#bbbbbb");
      return by_label.at(std::get<std::string>(it->second));
    };
  }
  return scheme;
}

std::optional<double> number_at(const DesignRecord& d, const std::string& column) {
  const auto it = d.values.find(column);
  if (it == d.values.end() || !std::holds_alternative<double>(it->second)) return std::nullopt;
  return std::get<double>(it->second);
}

std::string render_relation(const PlotSpec& spec, const Study& study) {
  const Series* data = nullptr;
  for (const auto& s : spec.series) {
    if (s.role == SeriesRole::Data) {
      data = &s;
      break;
    }
  }
  const std::string& xc = data->columns[0];
  const std::string& yc = data->columns[1];
  const auto xs = require_series(study, xc);
  const auto ys = require_series(study, yc);
  const Range xr = range_of(xs.values);
  const Range yr = range_of(ys.values);

  const Axis* x_axis = axis_for(spec, AxisSide::Bottom);
  if (!x_axis) x_axis = &spec.axes[0];
  const Axis* y_axis = &spec.axes[0] == x_axis ? &spec.axes[1] : &spec.axes[0];

  const auto scheme = color_scheme(spec, study, hex_color(data->color));

  Svg svg(spec.title);
  svg.line(kLeft, kBottom, kRight, kBottom, "#333333", 1, "axis");
  svg.line(kLeft, kTop, kLeft, kBottom, "#333333", 1, "axis");
  draw_x_ticks(svg, xr);
  draw_y_ticks(svg, kLeft, yr, false);
  svg.text((kLeft + kRight) / 2, kBottom + 40, axis_label(x_axis, xc), "middle", 13, "axis-label");
  svg.text(kLeft - 45, (kTop + kBottom) / 2, axis_label(y_axis, yc), "middle", 13, "axis-label", -90);

  for (const auto& d : study.designs) {
    const auto x = number_at(d, xc);
    const auto y = number_at(d, yc);
    if (!x || !y) continue;
    svg.dot(map_x(xr.fraction(*x)), map_y(yr.fraction(*y)), scheme.color(d), "point", d.design_id);
  }
  for (const auto& a : spec.annotations) {
    if (a.kind != AnnotationKind::BestDesign) continue;
    const auto* d = study.design(*a.design_id);
    if (!d) continue;
    const auto x = number_at(*d, xc);
    const auto y = number_at(*d, yc);
    if (!x || !y) continue;
    const double px = map_x(xr.fraction(*x));
    const double py = map_y(yr.fraction(*y));
    svg.ring(px, py, *a.design_id);
    svg.text(std::clamp(px, kLeft + 60, kRight - 60), py < kTop + 40 ? py + 24 : py - 14, a.text.empty() ? "best #" + std::to_string(*a.design_id) : a.text, "middle", 11, "best-label");
  }
  draw_text_annotations(svg, spec);

  if (spec.legend) {
    auto entries = scheme.legend;
    if (entries.empty()) entries.push_back({data->name, hex_color(data->color), LegendEntry::Dot});
    if (std::any_of(spec.annotations.begin(), spec.annotations.end(),
                    [](const Annotation& a) { return a.kind == AnnotationKind::BestDesign; })) {
      entries.push_back({"Best design", kBestColor, LegendEntry::Ring});
    }
    draw_legend(svg, entries);
  }
  return svg.finish();
}

std::string render_parallel(const PlotSpec& spec, const Study& study) {
  const auto& cols = spec.parallel_axes;
  const std::size_t k = cols.size();

  struct AxisScale {
    bool numeric = true;
    bool normalized = false;
    Range range;
    std::vector<std::string> categories;
  };
  std::vector<AxisScale> scales(k);
  std::optional<Range> shared;
  for (std::size_t i = 0; i < k; ++i) {
    const auto info = study.column(cols[i]);
    if (!info) throw Error(ErrorCode::UnknownColumn, "plot references unknown column '" + cols[i] + "'");
    auto& sc = scales[i];
    sc.numeric = info->numeric;
    sc.normalized = i < spec.axes.size() && spec.axes[i].normalized;
    if (sc.numeric) {
      sc.range = range_of(require_series(study, cols[i]).values);
      if (!sc.normalized) shared = shared ? merge(*shared, sc.range) : sc.range;
    } else {
      sc.categories = study.variable(cols[i])->categories;
    }
  }

  auto x_of = [&](std::size_t i) { return map_x(k == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(k - 1)); };
  // Unnormalized numeric axes share one common scale.
  auto fraction = [&](std::size_t i, const Value& v) -> std::optional<double> {
    const auto& sc = scales[i];
    if (sc.numeric) {
      if (!std::holds_alternative<double>(v)) return std::nullopt;
      const double x = std::get<double>(v);
      return sc.normalized ? sc.range.fraction(x) : shared->fraction(x);
    }
    if (!std::holds_alternative<std::string>(v)) return std::nullopt;
    const auto it = std::find(sc.categories.begin(), sc.categories.end(), std::get<std::string>(v));
    if (it == sc.categories.end()) return std::nullopt;
    if (sc.categories.size() == 1) return 0.5;
    return static_cast<double>(it - sc.categories.begin()) / static_cast<double>(sc.categories.size() - 1);
  };

  const Series& data = spec.series.front();
  const auto scheme = color_scheme(spec, study, hex_color(data.color));

  Svg svg(spec.title);
  for (std::size_t i = 0; i < k; ++i) {
    const double x = x_of(i);
    svg.line(x, kTop, x, kBottom, "#333333", 1, "axis");
    const std::string label = i < spec.axes.size() && !spec.axes[i].label.empty() ? spec.axes[i].label : cols[i];
    const char* anchor = i + 1 == k && k > 1 ? "end" : (i == 0 && k > 1 ? "start" : "middle");
    const double lx = i + 1 == k && k > 1 ? x + 8 : (i == 0 && k > 1 ? x - 8 : x);
    svg.text(lx, kBottom + (i % 2 == 0 ? 20 : 34), label, anchor, 12, "axis-label");
    const auto& sc = scales[i];
    if (!sc.numeric) {
      for (std::size_t c = 0; c < sc.categories.size(); ++c) {
        const double t = sc.categories.size() == 1 ? 0.5 : static_cast<double>(c) / static_cast<double>(sc.categories.size() - 1);
        svg.text(x + 6, map_y(t) + 4, sc.categories[c], "start", 11, "tick");
      }
    } else if (sc.normalized || i == 0 || !shared) {
      draw_y_ticks(svg, x, sc.normalized ? sc.range : *shared, i != 0);
    }
  }

  auto polyline_for = [&](const DesignRecord& d) -> std::optional<std::vector<std::pair<double, double>>> {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < k; ++i) {
      const auto it = d.values.find(cols[i]);
      const auto f = it == d.values.end() ? std::nullopt : fraction(i, it->second);
      if (!f) return std::nullopt;
      pts.emplace_back(x_of(i), map_y(*f));
    }
    return pts;
  };

  std::vector<DesignId> marked;
  for (const auto& a : spec.annotations) {
    if (a.kind == AnnotationKind::BestDesign) marked.push_back(*a.design_id);
  }
  std::size_t skipped = 0;
  for (const auto& d : study.designs) {
    if (std::find(marked.begin(), marked.end(), d.design_id) != marked.end()) continue;
    const auto pts = polyline_for(d);
    if (!pts) {
      ++skipped;
      continue;
    }
    svg.polyline(*pts, "design", {}, scheme.color(d), 1.2, false, 0.55);
  }
  for (DesignId id : marked) {
    const auto* d = study.design(id);
    if (!d) continue;
    const auto pts = polyline_for(*d);
    if (!pts) continue;
    svg.polyline(*pts, "best-design-line", {}, kBestColor, 3.5, false);
    for (const auto& [x, y] : *pts) svg.ring(x, y, id);
  }
  if (skipped > 0) {
    svg.text(kLeft, kBottom + 45, std::to_string(skipped) + " design(s) with missing values not drawn", "start", 11, "note");
  }
  draw_text_annotations(svg, spec);

  if (spec.legend) {
    auto entries = scheme.legend;
    if (entries.empty()) entries.push_back({data.name, hex_color(data.color), LegendEntry::Line});
    if (!marked.empty()) entries.push_back({"Best design", kBestColor, LegendEntry::Ring});
    draw_legend(svg, entries);
  }
  return svg.finish();
}

}  // namespace

std::string render_svg(const PlotSpec& spec, const Study& study) {
  validate_plotspec(spec);
  if (study.designs.empty()) throw Error(ErrorCode::EmptySeries, "study has no designs");
  switch (spec.kind) {
    case RequestClass::HistoryPlot: return render_history(spec, study);
    case RequestClass::Relation2D: return render_relation(spec, study);
    case RequestClass::ParallelPlot: return render_parallel(spec, study);
    case RequestClass::Unsupported: break;
  }
  throw Error(ErrorCode::UnsupportedKind, "cannot render an Unsupported spec");
}

}  // namespace vizagent
