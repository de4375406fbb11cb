#include "vizagent/eval.hpp"

#include "vizagent/error.hpp"
#include "vizagent/plotspec.hpp"
#include "vizagent/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace vizagent {

using nlohmann::json;

std::string_view to_string(SystemKind s) noexcept { return s == SystemKind::Proposed ? "proposed" : "baseline"; }

std::string_view to_string(Metric m) noexcept {
  switch (m) {
    case Metric::Validity: return "validity";
    case Metric::Correctness: return "correctness";
    case Metric::OutputQuality: return "output_quality";
  }
  return "output_quality";
}

std::optional<SystemKind> system_from_string(std::string_view s) noexcept {
  if (s == "proposed") return SystemKind::Proposed;
  if (s == "baseline") return SystemKind::Baseline;
  return std::nullopt;
}

std::optional<Metric> metric_from_string(std::string_view s) noexcept {
  if (s == "validity") return Metric::Validity;
  if (s == "correctness") return Metric::Correctness;
  if (s == "output_quality") return Metric::OutputQuality;
  return std::nullopt;
}

int RubricScore::metric(Metric m) const noexcept {
  switch (m) {
    case Metric::Validity: return validity;
    case Metric::Correctness: return correctness_total();
    case Metric::OutputQuality: return output_quality;
  }
  return 0;
}

void RubricScore::validate() const {
  auto binary = [](const char* name, int v) {
    if (v != 0 && v != 1) throw Error(ErrorCode::ScoreParseError, std::string(name) + " must be 0 or 1, got " + std::to_string(v));
  };
  if (scenario.empty()) throw Error(ErrorCode::ScoreParseError, "scenario is empty");
  if (assessor.empty()) throw Error(ErrorCode::ScoreParseError, "assessor is empty");
  binary("validity", validity);
  binary("efficiency", efficiency);
  binary("documentation", documentation);
  binary("exception_handling", exception_handling);
  binary("cleanliness", cleanliness);
  if (output_quality < 0 || output_quality > 3) {
    throw Error(ErrorCode::ScoreParseError, "output_quality must be in 0..3, got " + std::to_string(output_quality));
  }
}

AggregateStats aggregate(std::span<const int> scores) {
  if (scores.empty()) throw Error(ErrorCode::EmptyInput, "aggregate needs at least one score");
  AggregateStats s;
  s.n = scores.size();
  double sum = 0.0;
  for (int v : scores) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (int v : scores) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  std::map<int, std::size_t> freq;
  for (int v : scores) ++freq[v];
  std::size_t best = 0;
  // Ascending key order, so strict > keeps the smallest value on ties.
  for (const auto& [v, f] : freq) {
    if (f > best) {
      best = f;
      s.mode = v;
    }
  }
  return s;
}

Improvement improvement(double proposed_mean, double baseline_mean) {
  if (!(baseline_mean > 0.0)) throw Error(ErrorCode::ZeroBaseline, "baseline mean must be positive, got " + format_general(baseline_mean));
  Improvement out;
  out.percent = 100.0 * (proposed_mean - baseline_mean) / baseline_mean;
  out.rounded = std::lround(out.percent);
  return out;
}

const AggregateStats* ScenarioTable::cell(SystemKind s, Metric m, const std::string& scenario) const {
  auto it = cells.find({s, m, scenario});
  return it == cells.end() ? nullptr : &it->second;
}

double summary_of_means(std::span<const double> means) {
  if (means.empty()) throw Error(ErrorCode::EmptyInput, "no scenario means to summarize");
  double sum = 0.0;
  for (double m : means) sum += m;
  return sum / static_cast<double>(means.size());
}

std::optional<double> ScenarioTable::summary(SystemKind s, Metric m) const {
  std::vector<double> means;
  for (const auto& sc : scenarios) {
    if (const auto* c = cell(s, m, sc)) means.push_back(c->mean);
  }
  if (means.empty()) return std::nullopt;
  return summary_of_means(means);
}

ScenarioTable scenario_table(std::span<const RubricScore> scores) {
  if (scores.empty()) throw Error(ErrorCode::EmptyInput, "no scores");
  std::set<std::tuple<std::string, std::string, SystemKind>> seen;
  std::map<ScenarioTable::Key, std::vector<int>> buckets;
  std::set<std::string> scenarios;
  for (const auto& s : scores) {
    s.validate();
    if (!seen.insert({s.scenario, s.assessor, s.system}).second) {
      throw Error(ErrorCode::DuplicateScore, "second score for scenario '" + s.scenario + "', assessor '" + s.assessor +
                                                 "', system " + std::string(to_string(s.system)));
    }
    scenarios.insert(s.scenario);
    for (Metric m : {Metric::Validity, Metric::Correctness, Metric::OutputQuality}) {
      buckets[{s.system, m, s.scenario}].push_back(s.metric(m));
    }
  }
  ScenarioTable table;
  table.scenarios.assign(scenarios.begin(), scenarios.end());
  for (const auto& [key, values] : buckets) table.cells.emplace(key, aggregate(values));
  return table;
}

namespace {

template <typename T>
T required(const json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorCode::ScoreParseError, "line " + std::to_string(line) + ": missing field '" + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::ScoreParseError, "line " + std::to_string(line) + ": field '" + key + "' has the wrong type");
  }
}

int dimension(const json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorCode::ScoreParseError, "line " + std::to_string(line) + ": missing field '" + key + "'");
  if (!it->is_number_integer()) {
    throw Error(ErrorCode::ScoreParseError, "line " + std::to_string(line) + ": field '" + key + "' must be an integer");
  }
  return it->get<int>();
}

void fill_dimensions(RubricScore& s, const json& j, std::size_t line) {
  s.validity = dimension(j, "validity", line);
  s.efficiency = dimension(j, "efficiency", line);
  s.documentation = dimension(j, "documentation", line);
  s.exception_handling = dimension(j, "exception_handling", line);
  s.cleanliness = dimension(j, "cleanliness", line);
  s.output_quality = dimension(j, "output_quality", line);
}

json parse_line(const std::string& text, std::size_t line) {
  try {
    auto j = json::parse(text);
    if (!j.is_object()) throw Error(ErrorCode::ScoreParseError, "line " + std::to_string(line) + ": expected a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ScoreParseError, "line " + std::to_string(line) + ": " + e.what());
  }
}

SystemKind system_field(const json& j, std::size_t line) {
  const auto s = system_from_string(required<std::string>(j, "system", line));
  if (!s) throw Error(ErrorCode::ScoreParseError, "line " + std::to_string(line) + ": system must be proposed or baseline");
  return *s;
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

std::string sd_text(const std::optional<double>& sd) { return sd ? format_fixed(*sd, 2) : "-"; }

std::string pad_right(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

std::vector<RubricScore> parse_scores_jsonl(std::string_view text) {
  std::vector<RubricScore> out;
  const auto lines = split(text, '\n');
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const std::size_t line = i + 1;
    const auto j = parse_line(lines[i], line);
    RubricScore s;
    s.scenario = required<std::string>(j, "scenario", line);
    s.assessor = required<std::string>(j, "assessor", line);
    s.system = system_field(j, line);
    fill_dimensions(s, j, line);
    try {
      s.validate();
    } catch (const Error& e) {
      throw Error(ErrorCode::ScoreParseError, "line " + std::to_string(line) + ": " + e.detail());
    }
    out.push_back(std::move(s));
  }
  if (out.empty()) throw Error(ErrorCode::EmptyInput, "no scores in input");
  return out;
}

std::vector<ScenarioMean> parse_scenario_means_jsonl(std::string_view text) {
  std::vector<ScenarioMean> out;
  const auto lines = split(text, '\n');
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const std::size_t line = i + 1;
    const auto j = parse_line(lines[i], line);
    ScenarioMean m;
    m.system = system_field(j, line);
    const auto metric = metric_from_string(required<std::string>(j, "metric", line));
    if (!metric) throw Error(ErrorCode::ScoreParseError, "line " + std::to_string(line) + ": unknown metric");
    m.metric = *metric;
    m.scenario = required<std::string>(j, "scenario", line);
    m.mean = required<double>(j, "mean", line);
    if (!std::isfinite(m.mean)) throw Error(ErrorCode::ScoreParseError, "line " + std::to_string(line) + ": mean is not finite");
    out.push_back(std::move(m));
  }
  if (out.empty()) throw Error(ErrorCode::EmptyInput, "no scenario means in input");
  return out;
}

bool looks_like_scenario_means(std::string_view text) {
  for (const auto& line : split(text, '\n')) {
    if (trim(line).empty()) continue;
    try {
      const auto j = json::parse(line);
      return j.is_object() && j.contains("mean") && j.contains("metric");
    } catch (const json::exception&) {
      return false;
    }
  }
  return false;
}

std::string format_table_text(const ScenarioTable& table) {
  std::ostringstream out;
  out << pad_right("System", 10) << pad_right("Metric", 16) << pad_right("Scenario", 10) << pad_right("Mean", 7)
      << pad_right("SD", 7) << pad_right("Mode", 6) << "N\n";
  for (SystemKind s : {SystemKind::Proposed, SystemKind::Baseline}) {
    for (Metric m : {Metric::Validity, Metric::Correctness, Metric::OutputQuality}) {
      bool any = false;
      for (const auto& sc : table.scenarios) {
        const auto* c = table.cell(s, m, sc);
        if (!c) continue;
        any = true;
        out << pad_right(std::string(to_string(s)), 10) << pad_right(std::string(to_string(m)), 16) << pad_right(sc, 10)
            << pad_right(format_fixed(c->mean, 2), 7) << pad_right(sd_text(c->sd), 7) << pad_right(std::to_string(c->mode), 6)
            << c->n << "\n";
      }
      if (any) {
        out << pad_right(std::string(to_string(s)), 10) << pad_right(std::string(to_string(m)), 16) << pad_right("Summary", 10)
            << format_fixed(*table.summary(s, m), 2) << "\n";
      }
    }
  }
  for (Metric m : {Metric::Validity, Metric::Correctness, Metric::OutputQuality}) {
    const auto p = table.summary(SystemKind::Proposed, m);
    const auto b = table.summary(SystemKind::Baseline, m);
    if (!p || !b) continue;
    const double pr = round2(*p);
    const double br = round2(*b);
    out << to_string(m) << " improvement: ";
    if (br > 0.0) {
      out << improvement(pr, br).rounded << "% (" << format_fixed(pr, 2) << " vs " << format_fixed(br, 2) << ")\n";
    } else {
      out << "undefined (baseline mean is 0)\n";
    }
  }
  return out.str();
}

std::string format_table_csv(const ScenarioTable& table) {
  std::ostringstream out;
  out << "system,metric,scenario,mean,sd,mode,n\n";
  for (SystemKind s : {SystemKind::Proposed, SystemKind::Baseline}) {
    for (Metric m : {Metric::Validity, Metric::Correctness, Metric::OutputQuality}) {
      bool any = false;
      for (const auto& sc : table.scenarios) {
        const auto* c = table.cell(s, m, sc);
        if (!c) continue;
        any = true;
        out << to_string(s) << ',' << to_string(m) << ',' << sc << ',' << format_fixed(c->mean, 4) << ','
            << (c->sd ? format_fixed(*c->sd, 4) : std::string()) << ',' << c->mode << ',' << c->n << "\n";
      }
      if (any) out << to_string(s) << ',' << to_string(m) << ",summary," << format_fixed(*table.summary(s, m), 4) << ",,,\n";
    }
  }
  return out.str();
}

std::string format_means_report(std::span<const ScenarioMean> means) {
  std::map<std::pair<SystemKind, Metric>, std::map<std::string, double>> grid;
  for (const auto& m : means) {
    auto& row = grid[{m.system, m.metric}];
    if (!row.emplace(m.scenario, m.mean).second) {
      throw Error(ErrorCode::DuplicateScore, "second mean for " + std::string(to_string(m.system)) + " " +
                                                 std::string(to_string(m.metric)) + " " + m.scenario);
    }
  }
  std::ostringstream out;
  auto summary_for = [&](SystemKind s, Metric m) -> std::optional<double> {
    auto it = grid.find({s, m});
    if (it == grid.end()) return std::nullopt;
    std::vector<double> v;
    for (const auto& [_, x] : it->second) v.push_back(x);
    return summary_of_means(v);
  };
  for (const auto& [key, row] : grid) {
    out << to_string(key.first) << " " << to_string(key.second) << ":";
    for (const auto& [sc, x] : row) out << " " << sc << "=" << format_fixed(x, 2);
    out << " | summary " << format_fixed(*summary_for(key.first, key.second), 2) << "\n";
  }
  for (Metric m : {Metric::Validity, Metric::Correctness, Metric::OutputQuality}) {
    auto p = grid.find({SystemKind::Proposed, m});
    auto b = grid.find({SystemKind::Baseline, m});
    if (p == grid.end() || b == grid.end()) continue;
    for (const auto& [sc, pm] : p->second) {
      auto bit = b->second.find(sc);
      if (bit == b->second.end()) continue;
      out << to_string(m) << " improvement " << sc << ": ";
      if (round2(bit->second) > 0.0) {
        out << improvement(round2(pm), round2(bit->second)).rounded << "%\n";
      } else {
        out << "undefined (baseline mean is 0)\n";
      }
    }
    const double ps = round2(*summary_for(SystemKind::Proposed, m));
    const double bs = round2(*summary_for(SystemKind::Baseline, m));
    out << to_string(m) << " improvement summary: ";
    if (bs > 0.0) {
      out << improvement(ps, bs).rounded << "% (mean " << format_fixed(ps, 2) << " vs " << format_fixed(bs, 2) << ")\n";
    } else {
      out << "undefined (baseline mean is 0)\n";
    }
  }
  return out.str();
}

std::string default_rubric_prompt() { return trim(read_file(resource_dir() + "/prompts/rubric.txt")); }

RubricScore parse_score_block(std::string_view text, const AssessorRequest& request) {
  const auto lines = split(text, '\n');
  std::optional<std::string> body;
  for (std::size_t i = 0; i < lines.size() && !body; ++i) {
    if (to_lower(trim(lines[i])) != "```score") continue;
    std::string b;
    std::size_t j = i + 1;
    for (; j < lines.size() && trim(lines[j]) != "```"; ++j) b += lines[j] + "\n";
    if (j == lines.size()) throw Error(ErrorCode::ScoreParseError, "unterminated ```score block");
    body = std::move(b);
  }
  if (!body) throw Error(ErrorCode::ScoreParseError, "no ```score block in assessor output");
  json j;
  try {
    j = json::parse(*body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ScoreParseError, std::string("score block is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::ScoreParseError, "score block must be a JSON object");
  RubricScore s;
  s.scenario = request.scenario;
  s.assessor = request.assessor;
  s.system = request.system;
  try {
    fill_dimensions(s, j, 1);
  } catch (const Error& e) {
    throw Error(ErrorCode::ScoreParseError, "score block: " + e.detail().substr(e.detail().find(": ") + 2));
  }
  s.validate();
  return s;
}

RubricScore ai_assessor_score(const AssessorRequest& request, const std::string& rubric_prompt, const LlmGateway& gateway,
                              const MockResponder& mock) {
  const std::string user = "Scenario: " + request.scenario + "\nSystem: " + std::string(to_string(request.system)) +
                           "\n\nArtifact under review:\n" + request.artifact;
  const auto bundle = simple_bundle(rubric_prompt, user);
  const auto response = gateway.complete(bundle, mock);
  return parse_score_block(response.text, request);
}

std::string mock_assessor_response(const std::string& artifact, const AnalysisReport& report) {
  int validity = 0;
  int quality = 0;
  try {
    const auto parsed = parse_llm_output(artifact);
    validity = 1;
    const auto violations = check_guidelines(parsed.spec, report);
    quality = std::max(0, 3 - static_cast<int>(count_errors(violations)));
  } catch (const Error&) {
    validity = 0;
    quality = 0;
  }
  const json j{{"validity", validity}, {"efficiency", 1},      {"documentation", 1},
               {"exception_handling", 1}, {"cleanliness", 1}, {"output_quality", quality}};
  return "Assessment complete.\n```score\n" + j.dump() + "\n```\n";
}

}  // namespace vizagent
