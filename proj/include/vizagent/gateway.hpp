#pragma once

#include "vizagent/analysis.hpp"
#include "vizagent/prompt.hpp"
#include "vizagent/router.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

namespace vizagent {

enum class BackendMode { Http, Replay, Mock };

std::string_view to_string(BackendMode m) noexcept;
std::optional<BackendMode> backend_mode_from_string(std::string_view s) noexcept;

struct BackendConfig {
  BackendMode mode = BackendMode::Mock;
  std::string endpoint;                       // scheme://host[:port]
  std::string path = "/v1/chat/completions";
  std::string token;
  std::string model = "default";
  double timeout_s = 60.0;
  double temperature = 0.0;
  std::string fixture_path;                   // replay: JSONL of {fingerprint, response}
  std::string record_path;                    // http: append live responses here when set
  std::size_t max_in_flight = 4;

  // Throws ConfigError.
  void validate() const;
};

// Reads VIZAGENT_LLM_MODE, _ENDPOINT, _TOKEN, _MODEL, _FIXTURES over `base`.
BackendConfig config_from_env(BackendConfig base = {});

struct CompletionResponse {
  std::string text;
  BackendMode mode = BackendMode::Mock;
  double latency_ms = 0.0;
  std::string fingerprint;
};

// Hex SHA-256 of the assembled prompt bytes.
std::string prompt_fingerprint(const PromptBundle& bundle);

// Produces the mock-mode completion text for one call.
using MockResponder = std::function<std::string()>;

class LlmGateway {
 public:
  // Validates the config and loads replay fixtures up front.
  explicit LlmGateway(BackendConfig config);

  // Safe for concurrent calls. Mock mode requires a responder (ConfigError otherwise).
  CompletionResponse complete(const PromptBundle& bundle, const MockResponder& mock = {}) const;

  const BackendConfig& config() const noexcept { return config_; }
  std::size_t fixture_count() const noexcept { return fixtures_.size(); }

 private:
  std::string http_round_trip(const PromptBundle& bundle) const;
  void record(const std::string& fingerprint, const std::string& text) const;

  struct Limiter;

  BackendConfig config_;
  std::map<std::string, std::string> fixtures_;
  std::shared_ptr<Limiter> limiter_;
  std::shared_ptr<std::mutex> record_mu_;
};

CompletionResponse complete(const PromptBundle& bundle, const BackendConfig& config, const MockResponder& mock = {});

// Deterministic, guideline-compliant fenced plot spec built from the report.
// Throws UnsupportedKind for Unsupported requests.
std::string mock_generate(const AnalysisReport& report, const ClassifiedRequest& request);

// JSONL line for a replay fixture file.
std::string fixture_line(const std::string& fingerprint, const std::string& response);

}  // namespace vizagent
