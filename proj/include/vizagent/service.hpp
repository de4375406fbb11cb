#pragma once

#include "vizagent/analysis.hpp"
#include "vizagent/error.hpp"
#include "vizagent/eval.hpp"
#include "vizagent/gateway.hpp"
#include "vizagent/knowledge.hpp"
#include "vizagent/plotspec.hpp"
#include "vizagent/prompt.hpp"
#include "vizagent/router.hpp"
#include "vizagent/study.hpp"

#include <nlohmann/json_fwd.hpp>

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace vizagent {

struct StageTiming {
  std::string stage;
  double ms = 0.0;
};

struct GenerationResult {
  std::string id;  // content hash; timings excluded
  ClassifiedRequest request;
  std::optional<AnalysisReport> report;  // absent for refusals
  std::string prompt_fingerprint;
  std::string backend;  // empty when no LLM call was made
  bool refused = false;
  std::string refusal;
  std::string llm_text;  // raw completion of the last call
  std::vector<std::string> retrieved;
  std::optional<PlotSpec> spec;
  std::optional<std::string> spec_error;
  std::vector<Violation> violations;  // only when spec is set
  bool repaired = false;
  std::vector<std::string> warnings;
  std::optional<std::string> svg;  // only when spec is set and renders
  std::optional<std::string> render_error;
  std::vector<StageTiming> timings;
  double total_ms = 0.0;
};

nlohmann::json result_to_json(const GenerationResult& result, bool include_timing = true);

struct GenerateOptions {
  std::optional<BackendMode> backend;  // defaults to the agent's configured mode
  bool repair = false;                 // one regeneration round on error-severity violations
  bool llm_fallback = false;           // pass Unsupported prompts to the LLM instead of refusing
  std::size_t top_k = 3;
  bool persist = true;
};

struct AgentConfig {
  std::string data_dir;     // empty: nothing is persisted
  std::string corpus_dir;   // empty: resource_dir()/corpus
  BackendConfig backend;
  ReportOptions report;
  AssembleOptions prompt;
};

class Agent {
 public:
  explicit Agent(AgentConfig config);

  // Validates, replaces any study with the same id, and persists under data_dir/studies.
  void add_study(Study study, bool persist = true);
  std::shared_ptr<const Study> study(const std::string& id) const;
  std::vector<std::shared_ptr<const Study>> studies() const;

  // Throws UnknownStudy before any stage runs; later failures carry the stage name.
  GenerationResult generate(const std::string& study_id, const std::string& prompt, const GenerateOptions& options = {});

  // Persisted artifacts; throw UnknownResult.
  std::string result_json(const std::string& id) const;
  std::string result_svg(const std::string& id) const;

  const Index& index() const noexcept { return index_; }
  const AgentConfig& config() const noexcept { return config_; }

 private:
  std::shared_ptr<const LlmGateway> gateway_for(BackendMode mode);
  void persist_result(const GenerationResult& result) const;
  std::string results_dir() const;

  AgentConfig config_;
  Index index_;
  mutable std::shared_mutex studies_mu_;
  std::map<std::string, std::shared_ptr<const Study>> studies_;
  std::mutex gateways_mu_;
  std::map<BackendMode, std::shared_ptr<const LlmGateway>> gateways_;
};

nlohmann::json study_summary_json(const Study& study);
nlohmann::json scenario_table_json(const ScenarioTable& table);

// Eval over either a RubricScore JSONL file or a scenario-means JSONL file.
std::string evaluate_scores_text(std::string_view jsonl);
nlohmann::json evaluate_scores_json(std::string_view jsonl);

// HTTP status for an error code: 404 for unknown ids, 400 for user errors,
// 502 for gateway failures, 500 otherwise.
int http_status_for(ErrorCode code) noexcept;

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string static_dir;  // web console bundle; empty disables static serving
};

class HttpService {
 public:
  HttpService(Agent& agent, ServerOptions options);
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  // Binds; port 0 picks a free port. Returns the bound port.
  int bind();
  // Blocks until stop().
  void listen();
  void stop();
  bool wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace vizagent
