#include "vizagent/gateway.hpp"

#include "vizagent/error.hpp"
#include "vizagent/plotspec.hpp"
#include "vizagent/text.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <fstream>

namespace vizagent {

using nlohmann::json;

std::string_view to_string(BackendMode m) noexcept {
  switch (m) {
    case BackendMode::Http: return "http";
    case BackendMode::Replay: return "replay";
    case BackendMode::Mock: return "mock";
  }
  return "mock";
}

std::optional<BackendMode> backend_mode_from_string(std::string_view s) noexcept {
  if (s == "http") return BackendMode::Http;
  if (s == "replay") return BackendMode::Replay;
  if (s == "mock") return BackendMode::Mock;
  return std::nullopt;
}

void BackendConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::ConfigError, what); };
  if (!(timeout_s > 0.0)) fail("timeout must be positive");
  if (!(temperature >= 0.0)) fail("temperature must be non-negative");
  if (max_in_flight == 0) fail("max_in_flight must be at least 1");
  switch (mode) {
    case BackendMode::Http:
      if (endpoint.empty()) fail("http mode requires an endpoint");
      if (token.empty()) fail("http mode requires an auth token");
      if (endpoint.rfind("http://", 0) != 0 && endpoint.rfind("https://", 0) != 0) {
        fail("endpoint must start with http:// or https://");
      }
      break;
    case BackendMode::Replay:
      if (fixture_path.empty()) fail("replay mode requires a fixture path");
      break;
    case BackendMode::Mock:
      break;
  }
}

BackendConfig config_from_env(BackendConfig base) {
  auto env = [](const char* name) -> std::optional<std::string> {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    return std::string(v);
  };
  if (auto v = env("VIZAGENT_LLM_MODE")) {
    const auto mode = backend_mode_from_string(*v);
    if (!mode) throw Error(ErrorCode::ConfigError, "VIZAGENT_LLM_MODE must be http, replay or mock");
    base.mode = *mode;
  }
  if (auto v = env("VIZAGENT_LLM_ENDPOINT")) base.endpoint = *v;
  if (auto v = env("VIZAGENT_LLM_TOKEN")) base.token = *v;
  if (auto v = env("VIZAGENT_LLM_MODEL")) base.model = *v;
  if (auto v = env("VIZAGENT_LLM_FIXTURES")) base.fixture_path = *v;
  return base;
}

std::string prompt_fingerprint(const PromptBundle& bundle) { return sha256_hex(bundle.assembled); }

std::string fixture_line(const std::string& fingerprint, const std::string& response) {
  return json{{"fingerprint", fingerprint}, {"response", response}}.dump() + "\n";
}

struct LlmGateway::Limiter {
  explicit Limiter(std::size_t n) : free(n) {}
  std::mutex mu;
  std::condition_variable cv;
  std::size_t free;
};

namespace {

std::map<std::string, std::string> load_fixtures(const std::string& path) {
  std::map<std::string, std::string> out;
  std::string content;
  try {
    content = read_file(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, "replay fixtures: " + e.detail());
  }
  const auto lines = split(content, '\n');
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    try {
      const auto j = json::parse(lines[i]);
      out[j.at("fingerprint").get<std::string>()] = j.at("response").get<std::string>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ConfigError, path + ":" + std::to_string(i + 1) + ": bad fixture line (" + e.what() + ")");
    }
  }
  return out;
}

}  // namespace

LlmGateway::LlmGateway(BackendConfig config)
    : config_(std::move(config)),
      limiter_(std::make_shared<Limiter>(std::max<std::size_t>(config_.max_in_flight, 1))),
      record_mu_(std::make_shared<std::mutex>()) {
  config_.validate();
  if (config_.mode == BackendMode::Replay) fixtures_ = load_fixtures(config_.fixture_path);
}

void LlmGateway::record(const std::string& fingerprint, const std::string& text) const {
  std::lock_guard lock(*record_mu_);
  std::ofstream out(config_.record_path, std::ios::app | std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot append to '" + config_.record_path + "'");
  out << fixture_line(fingerprint, text);
}

std::string LlmGateway::http_round_trip(const PromptBundle& bundle) const {
  {
    std::unique_lock lock(limiter_->mu);
    limiter_->cv.wait(lock, [&] { return limiter_->free > 0; });
    --limiter_->free;
  }
  struct Release {
    Limiter& l;
    ~Release() {
      {
        std::lock_guard lock(l.mu);
        ++l.free;
      }
      l.cv.notify_one();
    }
  } release{*limiter_};

  httplib::Client client(config_.endpoint);
  const auto secs = static_cast<time_t>(config_.timeout_s);
  const auto usecs = static_cast<time_t>((config_.timeout_s - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  client.set_bearer_token_auth(config_.token);

  const json body{{"model", config_.model},
                  {"temperature", config_.temperature},
                  {"messages",
                   json::array({{{"role", "system"}, {"content", bundle.system_message()}},
                                {{"role", "user"}, {"content", bundle.user_text}}})}};
  auto res = client.Post(config_.path, body.dump(), "application/json");
  if (!res) {
    const auto err = res.error();
    if (err == httplib::Error::Read || err == httplib::Error::Write || err == httplib::Error::ConnectionTimeout) {
      throw Error(ErrorCode::Timeout, "no response from " + config_.endpoint + " within " + format_general(config_.timeout_s) +
                                          " s (" + httplib::to_string(err) + ")");
    }
    throw Error(ErrorCode::ConnectionError, "request to " + config_.endpoint + " failed: " + httplib::to_string(err));
  }
  if (res->status < 200 || res->status >= 300) {
    std::string snippet = res->body.substr(0, 200);
    throw Error(ErrorCode::HttpStatus, "backend returned HTTP " + std::to_string(res->status) + ": " + snippet)
        .with_http_status(res->status);
  }
  try {
    const auto j = json::parse(res->body);
    const auto& content = j.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw Error(ErrorCode::MalformedResponse, "message content is not a string");
    return content.get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedResponse, std::string("unexpected completion payload: ") + e.what());
  }
}

CompletionResponse LlmGateway::complete(const PromptBundle& bundle, const MockResponder& mock) const {
  const auto start = std::chrono::steady_clock::now();
  CompletionResponse out;
  out.mode = config_.mode;
  out.fingerprint = prompt_fingerprint(bundle);
  switch (config_.mode) {
    case BackendMode::Mock:
      if (!mock) throw Error(ErrorCode::ConfigError, "mock mode has no responder for this call");
      out.text = mock();
      break;
    case BackendMode::Replay: {
      auto it = fixtures_.find(out.fingerprint);
      if (it == fixtures_.end()) {
        throw Error(ErrorCode::FixtureMiss, "no recorded response for prompt fingerprint " + out.fingerprint);
      }
      out.text = it->second;
      break;
    }
    case BackendMode::Http:
      out.text = http_round_trip(bundle);
      if (!config_.record_path.empty()) record(out.fingerprint, out.text);
      break;
  }
  out.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

CompletionResponse complete(const PromptBundle& bundle, const BackendConfig& config, const MockResponder& mock) {
  return LlmGateway(config).complete(bundle, mock);
}

// ---------------------------------------------------------------------------
// Mock generator

namespace {

bool plottable(const AnalysisReport& report, const std::string& column) {
  const auto* c = report.column(column);
  return c && c->numeric && c->min.has_value();
}

std::vector<std::string> numeric_requested(const AnalysisReport& report, const ClassifiedRequest& request) {
  std::vector<std::string> out;
  for (const auto& c : request.columns) {
    if (plottable(report, c) && std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
  }
  return out;
}

std::vector<std::string> objectives(const AnalysisReport& report) {
  std::vector<std::string> out;
  for (const auto& c : report.columns) {
    if (c.role == ColumnRole::Objective) out.push_back(c.name);
  }
  return out;
}

void pad(std::vector<std::string>& cols, const std::vector<std::string>& candidates, std::size_t target,
         const AnalysisReport& report, bool numeric_only) {
  for (const auto& c : candidates) {
    if (cols.size() >= target) return;
    if (numeric_only && !plottable(report, c)) continue;
    if (std::find(cols.begin(), cols.end(), c) == cols.end()) cols.push_back(c);
  }
}

std::vector<std::string> all_columns(const AnalysisReport& report, std::optional<ColumnRole> role = {}) {
  std::vector<std::string> out;
  for (const auto& c : report.columns) {
    if (!role || c.role == *role) out.push_back(c.name);
  }
  return out;
}

// The study-level best design, preferring the feasible entry of the first listed objective.
const BestDesign* headline_best(const AnalysisReport& report, const std::vector<std::string>& preferred) {
  for (const auto& c : preferred) {
    if (const auto* b = report.best_for(c)) return b;
  }
  for (const auto& c : objectives(report)) {
    if (const auto* b = report.best_for(c)) return b;
  }
  return nullptr;
}

Annotation best_annotation(const BestDesign& b) {
  Annotation a;
  a.kind = AnnotationKind::BestDesign;
  a.design_id = b.design_id;
  a.text = "best " + b.objective + " #" + std::to_string(b.design_id);
  a.columns = {b.objective};
  return a;
}

PlotSpec mock_history(const AnalysisReport& report, const ClassifiedRequest& request) {
  auto cols = numeric_requested(report, request);
  if (cols.empty()) pad(cols, objectives(report), 2, report, true);
  if (cols.size() > 2) cols.resize(2);
  if (cols.empty()) throw Error(ErrorCode::InsufficientData, "no numeric column with values to plot");

  PlotSpec spec;
  spec.kind = RequestClass::HistoryPlot;
  spec.title = "Optimization history: " + cols[0] + (cols.size() > 1 ? " and " + cols[1] : std::string());
  static const char* data_colors[] = {"blue", "green"};
  static const char* best_colors[] = {"orange", "red"};
  spec.axes.push_back({"Design ID", std::nullopt, false, AxisSide::Bottom});
  for (std::size_t i = 0; i < cols.size(); ++i) {
    const AxisSide side = i == 0 ? AxisSide::Left : AxisSide::Right;
    const auto* conv = report.convergence_for(cols[i]);
    const bool converged = conv && conv->converged;
    Series data{cols[i], {cols[i]}, converged ? LineStyle::Solid : LineStyle::Dashed, data_colors[i], SeriesRole::Data, side};
    Series best{cols[i] + " (best so far)", {cols[i]}, LineStyle::Solid, best_colors[i], SeriesRole::RunningBest, side};
    spec.series.push_back(std::move(data));
    spec.series.push_back(std::move(best));
    spec.axes.push_back({cols[i], cols[i], false, side});
  }
  bool marked = false;
  for (const auto& c : cols) {
    if (const auto* b = report.best_for(c)) {
      spec.annotations.push_back(best_annotation(*b));
      marked = true;
    }
  }
  if (!marked) {
    if (const auto* b = headline_best(report, {})) spec.annotations.push_back(best_annotation(*b));
  }
  spec.legend = true;
  return spec;
}

PlotSpec mock_relation(const AnalysisReport& report, const ClassifiedRequest& request) {
  auto cols = numeric_requested(report, request);
  pad(cols, objectives(report), 2, report, true);
  pad(cols, all_columns(report), 2, report, true);
  if (cols.empty()) throw Error(ErrorCode::InsufficientData, "no numeric column with values to plot");
  if (cols.size() == 1) cols.push_back(cols[0]);
  cols.resize(2);

  PlotSpec spec;
  spec.kind = RequestClass::Relation2D;
  spec.title = cols[1] + " vs " + cols[0];
  spec.series.push_back({cols[0] + " vs " + cols[1], {cols[0], cols[1]}, LineStyle::Solid, "blue", SeriesRole::Data, AxisSide::Left});
  spec.axes.push_back({cols[0], cols[0], false, AxisSide::Bottom});
  spec.axes.push_back({cols[1], cols[1], false, AxisSide::Left});
  spec.color_by = std::string(kFeasibilityColoring);
  if (const auto* b = headline_best(report, cols)) spec.annotations.push_back(best_annotation(*b));
  if (const auto* corr = report.correlation_for(cols[0], cols[1]); corr && corr->r) {
    Annotation a;
    a.kind = AnnotationKind::Correlation;
    a.columns = {cols[0], cols[1]};
    a.value = *corr->r;
    a.position = "top_left";
    spec.annotations.push_back(std::move(a));
  }
  spec.legend = true;
  return spec;
}

PlotSpec mock_parallel(const AnalysisReport& report, const ClassifiedRequest& request) {
  std::vector<std::string> cols;
  for (const auto& c : request.columns) {
    if (report.column(c) && std::find(cols.begin(), cols.end(), c) == cols.end()) cols.push_back(c);
  }
  const auto vars = all_columns(report, ColumnRole::Variable);
  const auto objs = objectives(report);
  pad(cols, vars, 3, report, false);
  pad(cols, objs, 3, report, false);
  pad(cols, all_columns(report), 3, report, false);
  if (cols.size() < 3) throw Error(ErrorCode::InsufficientData, "parallel plots need at least 3 columns");

  PlotSpec spec;
  spec.kind = RequestClass::ParallelPlot;
  spec.title = "Design space: " + std::to_string(cols.size()) + " dimensions";
  spec.parallel_axes = cols;
  for (const auto& c : cols) spec.axes.push_back({c, c, true, AxisSide::Left});
  spec.series.push_back({"Designs", cols, LineStyle::Solid, "gray", SeriesRole::Data, AxisSide::Left});
  spec.color_by = std::string(kFeasibilityColoring);
  if (const auto* b = headline_best(report, cols)) spec.annotations.push_back(best_annotation(*b));
  spec.legend = true;
  return spec;
}

}  // namespace

std::string mock_generate(const AnalysisReport& report, const ClassifiedRequest& request) {
  PlotSpec spec;
  switch (request.request_class) {
    case RequestClass::HistoryPlot: spec = mock_history(report, request); break;
    case RequestClass::Relation2D: spec = mock_relation(report, request); break;
    case RequestClass::ParallelPlot: spec = mock_parallel(report, request); break;
    case RequestClass::Unsupported:
      throw Error(ErrorCode::UnsupportedKind, "mock_generate needs a supported request class");
  }
  return "Here is the plot specification.\n\n" + fence_plotspec(spec);
}

}  // namespace vizagent
