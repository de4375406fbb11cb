#include "vizagent/service.hpp"

#include "vizagent/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <filesystem>
#include <type_traits>

namespace vizagent {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json request_json(const ClassifiedRequest& r) {
  return {{"request_class", std::string(to_string(r.request_class))},
          {"columns", r.columns},
          {"raw_prompt", r.raw_prompt},
          {"confidence", r.confidence},
          {"unresolved_mentions", r.unresolved_mentions}};
}

json violation_json(const Violation& v, RequestClass kind) {
  json j{{"rule_id", v.rule_id},
         {"severity", std::string(to_string(v.severity))},
         {"message", v.message},
         {"element", v.element}};
  try {
    if (const auto* rule = guidelines_for(kind).rule(v.rule_id)) j["rule_text"] = rule->text;
  } catch (const Error&) {
  }
  return j;
}

std::string file_safe(const std::string& id) {
  std::string out;
  for (char c : id) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out += ok ? c : '_';
  }
  if (out.empty() || out[0] == '.') out = "_" + out;
  return out;
}

bool valid_result_id(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  return std::all_of(id.begin(), id.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)) || (c >= 'a' && c <= 'f'); });
}

class StageClock {
 public:
  explicit StageClock(GenerationResult& result) : result_(result), start_(Clock::now()), last_(start_) {}

  // Runs one stage, records its duration, and tags any Error with the stage name.
  // Stages are contiguous: each one is timed from the end of the previous one,
  // so the recorded timings add up to the total.
  template <typename F>
  decltype(auto) run(const char* stage, F&& f) {
    try {
      if constexpr (std::is_void_v<std::invoke_result_t<F>>) {
        f();
        mark(stage);
      } else {
        decltype(auto) out = f();
        mark(stage);
        return out;
      }
    } catch (const Error& e) {
      throw e.with_stage(stage);
    }
  }

  // Closes a stage whose work ran outside run().
  void mark(const char* stage) {
    const auto now = Clock::now();
    result_.timings.push_back({stage, std::chrono::duration<double, std::milli>(now - last_).count()});
    last_ = now;
  }

  void finish() { result_.total_ms = std::chrono::duration<double, std::milli>(Clock::now() - start_).count(); }

 private:
  using Clock = std::chrono::steady_clock;
  GenerationResult& result_;
  Clock::time_point start_;
  Clock::time_point last_;
};

}  // namespace

json result_to_json(const GenerationResult& r, bool include_timing) {
  json j;
  if (!r.id.empty()) j["id"] = r.id;
  j["request"] = request_json(r.request);
  j["report"] = r.report ? report_to_json(*r.report) : json(nullptr);
  j["prompt_fingerprint"] = r.prompt_fingerprint;
  j["backend"] = r.backend;
  j["refused"] = r.refused;
  j["refusal"] = r.refusal;
  j["llm_text"] = r.llm_text;
  j["retrieved"] = r.retrieved;
  j["spec"] = r.spec ? json::parse(plotspec_to_json(*r.spec)) : json(nullptr);
  j["spec_error"] = r.spec_error ? json(*r.spec_error) : json(nullptr);
  json vs = json::array();
  for (const auto& v : r.violations) vs.push_back(violation_json(v, r.request.request_class));
  j["violations"] = std::move(vs);
  j["error_count"] = count_errors(r.violations);
  j["repaired"] = r.repaired;
  j["warnings"] = r.warnings;
  j["svg"] = r.svg ? json(*r.svg) : json(nullptr);
  j["render_error"] = r.render_error ? json(*r.render_error) : json(nullptr);
  if (include_timing) {
    json t = json::array();
    for (const auto& s : r.timings) t.push_back({{"stage", s.stage}, {"ms", s.ms}});
    j["timings"] = std::move(t);
    j["total_ms"] = r.total_ms;
  }
  return j;
}

Agent::Agent(AgentConfig config) : config_(std::move(config)) {
  const std::string corpus = config_.corpus_dir.empty() ? resource_dir() + "/corpus" : config_.corpus_dir;
  index_ = Index::build(load_corpus(corpus));
  (void)gateway_for(config_.backend.mode);
  if (!config_.data_dir.empty()) {
    const fs::path dir = fs::path(config_.data_dir) / "studies";
    if (fs::is_directory(dir)) {
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) add_study(load_study_file(f.string()), false);
    }
  }
}

void Agent::add_study(Study study, bool persist) {
  validate_study(study);
  if (persist && !config_.data_dir.empty()) {
    const fs::path dir = fs::path(config_.data_dir) / "studies";
    fs::create_directories(dir);
    write_file_atomic((dir / (file_safe(study.id) + ".json")).string(), export_study(study));
  }
  auto ptr = std::make_shared<const Study>(std::move(study));
  std::unique_lock lock(studies_mu_);
  studies_[ptr->id] = std::move(ptr);
}

std::shared_ptr<const Study> Agent::study(const std::string& id) const {
  std::shared_lock lock(studies_mu_);
  auto it = studies_.find(id);
  if (it == studies_.end()) throw Error(ErrorCode::UnknownStudy, "no study with id '" + id + "'");
  return it->second;
}

std::vector<std::shared_ptr<const Study>> Agent::studies() const {
  std::shared_lock lock(studies_mu_);
  std::vector<std::shared_ptr<const Study>> out;
  for (const auto& [_, s] : studies_) out.push_back(s);
  return out;
}

std::shared_ptr<const LlmGateway> Agent::gateway_for(BackendMode mode) {
  std::lock_guard lock(gateways_mu_);
  auto it = gateways_.find(mode);
  if (it != gateways_.end()) return it->second;
  BackendConfig cfg = config_.backend;
  cfg.mode = mode;
  auto gw = std::make_shared<const LlmGateway>(cfg);
  gateways_.emplace(mode, gw);
  return gw;
}

std::string Agent::results_dir() const { return (fs::path(config_.data_dir) / "results").string(); }

void Agent::persist_result(const GenerationResult& result) const {
  if (config_.data_dir.empty()) return;
  fs::create_directories(results_dir());
  const fs::path base = fs::path(results_dir()) / result.id;
  // The SVG lands first so a visible JSON always has its SVG.
  if (result.svg) write_file_atomic(base.string() + ".svg", *result.svg);
  write_file_atomic(base.string() + ".json", result_to_json(result).dump(2));
}

std::string Agent::result_json(const std::string& id) const {
  const fs::path p = fs::path(results_dir()) / (id + ".json");
  if (config_.data_dir.empty() || !valid_result_id(id) || !fs::is_regular_file(p)) {
    throw Error(ErrorCode::UnknownResult, "no result with id '" + id + "'");
  }
  return read_file(p.string());
}

std::string Agent::result_svg(const std::string& id) const {
  const fs::path p = fs::path(results_dir()) / (id + ".svg");
  if (config_.data_dir.empty() || !valid_result_id(id) || !fs::is_regular_file(p)) {
    throw Error(ErrorCode::UnknownResult, "no SVG for result '" + id + "'");
  }
  return read_file(p.string());
}

GenerationResult Agent::generate(const std::string& study_id, const std::string& prompt, const GenerateOptions& options) {
  const auto study_ptr = study(study_id);
  const Study& s = *study_ptr;
  GenerationResult result;
  StageClock clock(result);

  result.request = clock.run("classify", [&] { return classify(prompt, s); });
  const ClassifiedRequest& request = result.request;
  const BackendMode mode = options.backend.value_or(config_.backend.mode);

  if (request.request_class == RequestClass::Unsupported) {
    result.refused = true;
    result.refusal = "This request does not ask for a supported plot (history, 2D relation or parallel plot).";
    if (options.llm_fallback) {
      const auto gw = clock.run("gateway", [&] { return gateway_for(mode); });
      const auto bundle = simple_bundle(default_system_text(), prompt);
      const auto response = clock.run("complete", [&] {
        return gw->complete(bundle, [] { return std::string("This request is outside what I can plot."); });
      });
      result.backend = std::string(to_string(mode));
      result.prompt_fingerprint = response.fingerprint;
      result.llm_text = response.text;
    }
  } else {
    const AnalysisReport& report = result.report.emplace(clock.run("analyze", [&] { return generate_report(s, request, config_.report); }));
    const auto& guidelines = clock.run("guidelines", [&]() -> const GuidelineSet& { return guidelines_for(request.request_class); });
    const auto snippets = clock.run("retrieve", [&] {
      std::vector<Document> docs;
      if (options.top_k == 0) return docs;
      for (const auto& hit : index_.retrieve(prompt, options.top_k, request.request_class)) {
        docs.push_back(*index_.document(hit.document_id));
      }
      return docs;
    });
    for (const auto& d : snippets) result.retrieved.push_back(d.id);
    auto bundle = clock.run("assemble", [&] {
      return assemble(default_system_text(), guidelines, report, snippets, prompt, config_.prompt);
    });
    for (const auto& id : bundle.dropped_snippets) result.warnings.push_back("snippet '" + id + "' dropped to fit the prompt limit");
    const auto gw = clock.run("gateway", [&] { return gateway_for(mode); });
    const MockResponder mock = [&] { return mock_generate(report, request); };

    auto attempt = [&](const PromptBundle& b, const char* complete_stage, const char* parse_stage) {
      const auto response = clock.run(complete_stage, [&] { return gw->complete(b, mock); });
      result.backend = std::string(to_string(mode));
      result.prompt_fingerprint = response.fingerprint;
      result.llm_text = response.text;
      result.spec.reset();
      result.spec_error.reset();
      result.violations.clear();
      try {
        auto parsed = parse_llm_output(response.text);
        auto violations = check_guidelines(parsed.spec, report, guidelines);
        result.spec = std::move(parsed.spec);
        result.violations = std::move(violations);
        for (auto& w : parsed.warnings) result.warnings.push_back(std::move(w));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoSpecBlock && e.code() != ErrorCode::SpecParseError &&
            e.code() != ErrorCode::SpecInvariantError && e.code() != ErrorCode::ReportMismatch) {
          throw e.with_stage(parse_stage);
        }
        result.spec_error = e.what();
      }
      clock.mark(parse_stage);
    };

    attempt(bundle, "complete", "validate");
    if (options.repair && result.spec && count_errors(result.violations) > 0) {
      const std::string addendum = repair_prompt(*result.spec, result.violations, guidelines);
      const auto repair_bundle = clock.run("assemble", [&] {
        return assemble(default_system_text(), guidelines, report, snippets, prompt + "\n\n" + addendum, config_.prompt);
      });
      attempt(repair_bundle, "complete_repair", "validate_repair");
      result.repaired = true;
    }

    if (result.spec) {
      try {
        result.svg = render_svg(*result.spec, s);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::UnknownColumn && e.code() != ErrorCode::EmptySeries && e.code() != ErrorCode::TypeError) {
          throw e.with_stage("render");
        }
        result.render_error = e.what();
      }
      clock.mark("render");
    }
  }

  result.id = clock.run("hash", [&] { return sha256_hex(result_to_json(result, false).dump()).substr(0, 24); });
  if (options.persist) clock.run("persist", [&] { persist_result(result); });
  clock.finish();
  return result;
}

json study_summary_json(const Study& s) {
  json cols = json::array();
  for (const auto& c : s.columns()) {
    cols.push_back({{"name", c.name}, {"role", std::string(to_string(c.role))}, {"numeric", c.numeric}});
  }
  return {{"id", s.id},
          {"title", s.title},
          {"designs", s.designs.size()},
          {"constraints", s.constraints.size()},
          {"columns", std::move(cols)}};
}

json scenario_table_json(const ScenarioTable& table) {
  json cells = json::array();
  for (const auto& [key, stats] : table.cells) {
    const auto& [system, metric, scenario] = key;
    cells.push_back({{"system", std::string(to_string(system))},
                     {"metric", std::string(to_string(metric))},
                     {"scenario", scenario},
                     {"mean", stats.mean},
                     {"sd", stats.sd ? json(*stats.sd) : json(nullptr)},
                     {"mode", stats.mode},
                     {"n", stats.n}});
  }
  json summaries = json::array();
  for (SystemKind s : {SystemKind::Proposed, SystemKind::Baseline}) {
    for (Metric m : {Metric::Validity, Metric::Correctness, Metric::OutputQuality}) {
      if (auto v = table.summary(s, m)) {
        summaries.push_back({{"system", std::string(to_string(s))}, {"metric", std::string(to_string(m))}, {"mean", *v}});
      }
    }
  }
  return {{"scenarios", table.scenarios}, {"cells", std::move(cells)}, {"summaries", std::move(summaries)}};
}

std::string evaluate_scores_text(std::string_view jsonl) {
  if (looks_like_scenario_means(jsonl)) {
    const auto means = parse_scenario_means_jsonl(jsonl);
    return format_means_report(means);
  }
  const auto scores = parse_scores_jsonl(jsonl);
  return format_table_text(scenario_table(scores));
}

json evaluate_scores_json(std::string_view jsonl) {
  json j;
  if (looks_like_scenario_means(jsonl)) {
    j["input"] = "scenario_means";
  } else {
    j["input"] = "scores";
    j["table"] = scenario_table_json(scenario_table(parse_scores_jsonl(jsonl)));
  }
  j["text"] = evaluate_scores_text(jsonl);
  return j;
}

int http_status_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnknownStudy:
    case ErrorCode::UnknownResult:
      return 404;
    case ErrorCode::Timeout:
    case ErrorCode::ConnectionError:
    case ErrorCode::HttpStatus:
    case ErrorCode::MalformedResponse:
    case ErrorCode::FixtureMiss:
      return 502;
    default:
      return is_user_error(code) ? 400 : 500;
  }
}

}  // namespace vizagent
