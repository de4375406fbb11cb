#include "vizagent/analysis.hpp"

#include "vizagent/error.hpp"
#include "vizagent/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vizagent {

using nlohmann::json;

void ConvergenceParams::validate() const {
  if (window < 2) throw Error(ErrorCode::InvalidArgument, "convergence window must be >= 2");
  if (!(rel_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "rel_tol must be > 0");
  if (!(abs_floor > 0.0)) throw Error(ErrorCode::InvalidArgument, "abs_floor must be > 0");
}

namespace {

void require_finite(std::span<const double> series, const char* what) {
  if (series.empty()) throw Error(ErrorCode::EmptySeries, std::string(what) + ": series is empty");
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (!std::isfinite(series[i])) {
      throw Error(ErrorCode::NonFiniteValue, std::string(what) + ": non-finite value at index " + std::to_string(i));
    }
  }
}

bool better(double a, double b, Direction d) { return d == Direction::Minimize ? a < b : a > b; }

}  // namespace

ConvergenceStatus assess_convergence(std::span<const double> series, const ConvergenceParams& params) {
  params.validate();
  require_finite(series, "assess_convergence");
  ConvergenceStatus status;
  status.window_used = std::min(series.size(), params.window);
  const auto tail = series.subspan(series.size() - status.window_used);
  const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
  double magnitude = 0.0;
  for (double v : tail) magnitude = std::max(magnitude, std::abs(v));
  status.rel_range = (*hi - *lo) / std::max(magnitude, params.abs_floor);
  status.converged = series.size() >= params.window && status.rel_range <= params.rel_tol;
  return status;
}

std::vector<double> running_best(std::span<const double> series, Direction direction) {
  require_finite(series, "running_best");
  std::vector<double> out;
  out.reserve(series.size());
  double best = series.front();
  for (double v : series) {
    if (better(v, best, direction)) best = v;
    out.push_back(best);
  }
  return out;
}

BestDesign best_design(const Study& study, std::string_view objective, bool feasible_only) {
  const auto* obj = study.objective(objective);
  if (!obj) throw Error(ErrorCode::UnknownColumn, "'" + std::string(objective) + "' is not an objective");
  const auto mask = feasibility_mask(study);
  std::optional<BestDesign> best;
  for (std::size_t i = 0; i < study.designs.size(); ++i) {
    if (feasible_only && !mask[i]) continue;
    const Value& v = study.designs[i].values.at(obj->name);
    if (!std::holds_alternative<double>(v)) continue;
    const double x = std::get<double>(v);
    // Designs are in id order, so strict improvement keeps the smallest id on ties.
    if (!best || better(x, best->value, obj->direction)) {
      best = BestDesign{obj->name, study.designs[i].design_id, x, feasible_only};
    }
  }
  if (!best) {
    throw Error(ErrorCode::NoEligibleDesign, std::string("no ") + (feasible_only ? "feasible " : "") +
                                                 "design with a value for '" + obj->name + "'");
  }
  return *best;
}

CorrelationResult pearson_correlation(std::span<const std::optional<double>> x,
                                      std::span<const std::optional<double>> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::InvalidArgument, "pearson_correlation: length mismatch");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!x[i] || !y[i]) continue;
    if (!std::isfinite(*x[i]) || !std::isfinite(*y[i])) {
      throw Error(ErrorCode::NonFiniteValue, "pearson_correlation: non-finite value at index " + std::to_string(i));
    }
    xs.push_back(*x[i]);
    ys.push_back(*y[i]);
  }
  const std::size_t n = xs.size();
  if (n < 2) throw Error(ErrorCode::InsufficientData, "pearson_correlation: fewer than 2 complete pairs");

  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  CorrelationResult out;
  out.n = n;
  if (sxx > 0.0 && syy > 0.0) out.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  return out;
}

CorrelationResult pearson_correlation(std::span<const double> x, std::span<const double> y) {
  std::vector<std::optional<double>> ox(x.begin(), x.end());
  std::vector<std::optional<double>> oy(y.begin(), y.end());
  return pearson_correlation(std::span<const std::optional<double>>(ox), std::span<const std::optional<double>>(oy));
}

std::vector<double> min_max_normalize(std::span<const double> series) {
  require_finite(series, "min_max_normalize");
  const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
  const double min = *lo;
  const double span = *hi - min;
  std::vector<double> out;
  out.reserve(series.size());
  for (double v : series) out.push_back(span > 0.0 ? (v - min) / span : 0.0);
  return out;
}

ScaleDisparity detect_scale_disparity(const std::vector<NamedSeries>& series, double ratio_threshold) {
  if (series.size() < 2) throw Error(ErrorCode::InsufficientData, "detect_scale_disparity needs at least 2 series");
  if (!(ratio_threshold > 0.0)) throw Error(ErrorCode::InvalidArgument, "ratio threshold must be > 0");
  std::vector<double> magnitude;
  for (const auto& s : series) {
    double m = 0.0;
    for (double v : s.values) {
      if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteValue, "series '" + s.name + "' has a non-finite value");
      m = std::max(m, std::abs(v));
    }
    magnitude.push_back(m);
  }
  ScaleDisparity out;
  for (std::size_t i = 0; i < series.size(); ++i) {
    for (std::size_t j = i + 1; j < series.size(); ++j) {
      const double a = magnitude[i];
      const double b = magnitude[j];
      if (a <= 0.0 || b <= 0.0) continue;
      if (std::max(a, b) / std::min(a, b) > ratio_threshold) out.pairs.emplace_back(series[i].name, series[j].name);
    }
  }
  out.disparate = !out.pairs.empty();
  return out;
}

// ---------------------------------------------------------------------------

const ConvergenceStatus* AnalysisReport::convergence_for(std::string_view column) const {
  for (const auto& c : convergence) {
    if (c.column == column) return &c;
  }
  return nullptr;
}

const ColumnSummary* AnalysisReport::column(std::string_view name) const {
  for (const auto& c : columns) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const BestDesign* AnalysisReport::best_for(std::string_view objective) const {
  const BestDesign* overall = nullptr;
  for (const auto& b : best_designs) {
    if (b.objective != objective) continue;
    if (b.feasible_only) return &b;
    if (!overall) overall = &b;
  }
  return overall;
}

const CorrelationResult* AnalysisReport::correlation_for(std::string_view a, std::string_view b) const {
  for (const auto& c : correlations) {
    if ((c.x == a && c.y == b) || (c.x == b && c.y == a)) return &c;
  }
  return nullptr;
}

AnalysisReport generate_report(const Study& study, const ClassifiedRequest& request, const ReportOptions& options) {
  options.convergence.validate();
  AnalysisReport report;
  report.study_id = study.id;
  report.request_class = request.request_class;
  report.requested_columns = request.columns;
  report.scale_ratio = options.scale_ratio;
  for (const auto& name : request.columns) {
    if (!study.column(name)) throw Error(ErrorCode::UnknownColumn, "request references unknown column '" + name + "'");
  }

  for (const auto& col : study.columns()) {
    ColumnSummary summary{col.name, col.role, col.numeric, std::nullopt, std::nullopt, 0};
    const auto series = column_series(study, col.name);
    summary.missing = series.missing_ids.size();
    if (col.numeric) {
      for (const auto& p : series.points) {
        const double v = std::get<double>(p.value);
        summary.min = summary.min ? std::min(*summary.min, v) : v;
        summary.max = summary.max ? std::max(*summary.max, v) : v;
      }
    }
    report.columns.push_back(std::move(summary));
  }

  auto assess = [&](const std::string& name) {
    const auto series = numeric_series(study, name);
    ConvergenceStatus status;
    if (series.values.empty()) {
      report.notes.push_back("'" + name + "' has no evaluated values; convergence cannot be assessed");
    } else {
      status = assess_convergence(series.values, options.convergence);
    }
    status.column = name;
    if (!series.missing_ids.empty()) {
      report.notes.push_back("'" + name + "' skips " + std::to_string(series.missing_ids.size()) +
                             " failed evaluation(s)");
    }
    report.convergence.push_back(std::move(status));
  };
  for (const auto& o : study.objectives) assess(o.name);
  if (request.request_class == RequestClass::HistoryPlot) {
    for (const auto& name : request.columns) {
      const auto info = study.column(name);
      if (info->numeric && info->role != ColumnRole::Objective) assess(name);
    }
  }

  for (const auto& o : study.objectives) {
    for (bool feasible_only : {false, true}) {
      if (feasible_only && study.constraints.empty()) continue;
      try {
        report.best_designs.push_back(best_design(study, o.name, feasible_only));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoEligibleDesign) throw;
        report.notes.push_back(e.detail());
      }
    }
  }

  const auto mask = feasibility_mask(study);
  report.feasible_count = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
  report.infeasible_count = mask.size() - report.feasible_count;

  std::vector<std::string> numeric_requested;
  for (const auto& name : request.columns) {
    if (study.column(name)->numeric) {
      numeric_requested.push_back(name);
    } else {
      report.notes.push_back("'" + name + "' is categorical; excluded from correlations and scale checks");
    }
  }

  std::vector<NamedSeries> scale_inputs;
  for (const auto& name : numeric_requested) {
    auto s = numeric_series(study, name);
    if (!s.values.empty()) scale_inputs.push_back({name, std::move(s.values)});
  }
  if (scale_inputs.size() >= 2) report.scale = detect_scale_disparity(scale_inputs, options.scale_ratio);

  auto aligned = [&](const std::string& name) {
    std::vector<std::optional<double>> out;
    out.reserve(study.designs.size());
    for (const auto& d : study.designs) {
      const Value& v = d.values.at(name);
      out.push_back(std::holds_alternative<double>(v) ? std::optional<double>(std::get<double>(v)) : std::nullopt);
    }
    return out;
  };
  for (std::size_t i = 0; i < numeric_requested.size(); ++i) {
    for (std::size_t j = i + 1; j < numeric_requested.size(); ++j) {
      const auto xs = aligned(numeric_requested[i]);
      const auto ys = aligned(numeric_requested[j]);
      try {
        auto c = pearson_correlation(std::span<const std::optional<double>>(xs), std::span<const std::optional<double>>(ys));
        c.x = numeric_requested[i];
        c.y = numeric_requested[j];
        report.correlations.push_back(std::move(c));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::InsufficientData) throw;
        report.notes.push_back("correlation " + numeric_requested[i] + " vs " + numeric_requested[j] +
                               " skipped: fewer than 2 complete pairs");
      }
    }
  }

  report.rendered_text = render_report_text(report);
  return report;
}

std::string render_report_text(const AnalysisReport& r) {
  std::ostringstream out;
  out << "Study: " << r.study_id << "\n";
  out << "Request: " << to_string(r.request_class);
  if (!r.requested_columns.empty()) {
    out << " on ";
    for (std::size_t i = 0; i < r.requested_columns.size(); ++i) out << (i ? ", " : "") << r.requested_columns[i];
  }
  out << "\n\n## Convergence\n";
  for (const auto& c : r.convergence) {
    out << "- " << c.column << ": " << (c.converged ? "converged" : "NOT converged") << " (relative range "
        << format_general(c.rel_range, 4) << " over the last " << c.window_used << " designs)\n";
  }
  const bool all_converged =
      std::all_of(r.convergence.begin(), r.convergence.end(), [](const ConvergenceStatus& c) { return c.converged; });
  out << (all_converged ? "- all assessed columns have converged\n"
                        : "- the study is not finished: at least one column has not converged\n");

  out << "\n## Best designs\n";
  if (r.best_designs.empty()) out << "- none\n";
  for (const auto& b : r.best_designs) {
    out << "- " << b.objective << (b.feasible_only ? " (feasible only)" : "") << ": design " << b.design_id
        << ", value " << format_general(b.value, 6) << "\n";
  }

  out << "\n## Feasibility\n";
  out << "- " << r.feasible_count << " feasible, " << r.infeasible_count << " infeasible of "
      << (r.feasible_count + r.infeasible_count) << " designs\n";

  out << "\n## Scale\n";
  if (r.scale.disparate) {
    for (const auto& [a, b] : r.scale.pairs) {
      out << "- scale disparity between " << a << " and " << b << ": normalize or separate their axes\n";
    }
  } else {
    out << "- no scale disparity among the requested columns\n";
  }

  out << "\n## Correlations\n";
  if (r.correlations.empty()) out << "- none\n";
  for (const auto& c : r.correlations) {
    out << "- " << c.x << " vs " << c.y << ": ";
    if (c.r) out << "r = " << format_fixed(*c.r, 2);
    else out << "undefined (zero variance)";
    out << " (n = " << c.n << ")\n";
  }

  if (!r.notes.empty()) {
    out << "\n## Notes\n";
    for (const auto& n : r.notes) out << "- " << n << "\n";
  }
  return out.str();
}

json report_to_json(const AnalysisReport& r) {
  json j;
  j["study_id"] = r.study_id;
  j["request_class"] = std::string(to_string(r.request_class));
  j["requested_columns"] = r.requested_columns;
  json cols = json::array();
  for (const auto& c : r.columns) {
    cols.push_back({{"name", c.name},
                    {"role", std::string(to_string(c.role))},
                    {"numeric", c.numeric},
                    {"min", c.min ? json(*c.min) : json(nullptr)},
                    {"max", c.max ? json(*c.max) : json(nullptr)},
                    {"missing", c.missing}});
  }
  j["columns"] = std::move(cols);
  json conv = json::array();
  for (const auto& c : r.convergence) {
    conv.push_back({{"column", c.column}, {"converged", c.converged}, {"window_used", c.window_used}, {"rel_range", c.rel_range}});
  }
  j["convergence"] = std::move(conv);
  json best = json::array();
  for (const auto& b : r.best_designs) {
    best.push_back({{"objective", b.objective}, {"design_id", b.design_id}, {"value", b.value}, {"feasible_only", b.feasible_only}});
  }
  j["best_designs"] = std::move(best);
  j["feasible_count"] = r.feasible_count;
  j["infeasible_count"] = r.infeasible_count;
  json pairs = json::array();
  for (const auto& [a, b] : r.scale.pairs) pairs.push_back({a, b});
  j["scale_disparity"] = {{"disparate", r.scale.disparate}, {"pairs", std::move(pairs)}, {"ratio_threshold", r.scale_ratio}};
  json corr = json::array();
  for (const auto& c : r.correlations) {
    corr.push_back({{"x", c.x}, {"y", c.y}, {"r", c.r ? json(*c.r) : json("undefined")}, {"n", c.n}});
  }
  j["correlations"] = std::move(corr);
  j["notes"] = r.notes;
  j["rendered_text"] = r.rendered_text;
  return j;
}

AnalysisReport report_from_json(const json& j) {
  try {
    AnalysisReport r;
    r.study_id = j.at("study_id").get<std::string>();
    r.request_class = request_class_from_string(j.at("request_class").get<std::string>()).value_or(RequestClass::Unsupported);
    r.requested_columns = j.at("requested_columns").get<std::vector<std::string>>();
    for (const auto& c : j.at("columns")) {
      ColumnSummary s;
      s.name = c.at("name").get<std::string>();
      const auto role = c.at("role").get<std::string>();
      s.role = role == "objective" ? ColumnRole::Objective : role == "response" ? ColumnRole::Response : ColumnRole::Variable;
      s.numeric = c.at("numeric").get<bool>();
      if (!c.at("min").is_null()) s.min = c.at("min").get<double>();
      if (!c.at("max").is_null()) s.max = c.at("max").get<double>();
      s.missing = c.at("missing").get<std::size_t>();
      r.columns.push_back(std::move(s));
    }
    for (const auto& c : j.at("convergence")) {
      r.convergence.push_back({c.at("column").get<std::string>(), c.at("converged").get<bool>(),
                               c.at("window_used").get<std::size_t>(), c.at("rel_range").get<double>()});
    }
    for (const auto& b : j.at("best_designs")) {
      r.best_designs.push_back({b.at("objective").get<std::string>(), b.at("design_id").get<DesignId>(),
                                b.at("value").get<double>(), b.at("feasible_only").get<bool>()});
    }
    r.feasible_count = j.at("feasible_count").get<std::size_t>();
    r.infeasible_count = j.at("infeasible_count").get<std::size_t>();
    r.scale.disparate = j.at("scale_disparity").at("disparate").get<bool>();
    r.scale_ratio = j.at("scale_disparity").value("ratio_threshold", kDefaultScaleRatio);
    for (const auto& p : j.at("scale_disparity").at("pairs")) {
      r.scale.pairs.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
    }
    for (const auto& c : j.at("correlations")) {
      CorrelationResult cr;
      cr.x = c.at("x").get<std::string>();
      cr.y = c.at("y").get<std::string>();
      if (c.at("r").is_number()) cr.r = c.at("r").get<double>();
      cr.n = c.at("n").get<std::size_t>();
      r.correlations.push_back(std::move(cr));
    }
    r.notes = j.at("notes").get<std::vector<std::string>>();
    r.rendered_text = j.at("rendered_text").get<std::string>();
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string("analysis report: ") + e.what());
  }
}

}  // namespace vizagent
