#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vizagent {

// Every declared failure mode of the pipeline. Names are part of the JSON and
// CLI surface, so keep them stable.
enum class ErrorCode {
  SchemaError,
  IntegrityError,
  TypeError,
  ParseError,
  UnknownColumn,
  UnknownDesign,
  NonFiniteValue,
  EmptySeries,
  InvalidArgument,
  NoEligibleDesign,
  InsufficientData,
  EmptyCorpus,
  DuplicateId,
  UnsupportedKind,
  ConfigError,
  Timeout,
  ConnectionError,
  HttpStatus,
  FixtureMiss,
  MalformedResponse,
  NoSpecBlock,
  SpecParseError,
  SpecInvariantError,
  ReportMismatch,
  ContractError,
  EmptyInput,
  ZeroBaseline,
  DuplicateScore,
  ScoreParseError,
  UnknownStudy,
  UnknownResult,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Errors caused by the caller's input (bad files, unknown ids, unsupported
// requests) as opposed to backend or environment failures.
bool is_user_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

  // Pipeline stage the error surfaced in; empty outside the service.
  const std::string& stage() const noexcept { return stage_; }
  Error with_stage(std::string stage) const;

  int http_status() const noexcept { return http_status_; }
  Error with_http_status(int status) const;

 private:
  ErrorCode code_;
  std::string detail_;
  std::string stage_;
  int http_status_ = 0;
};

}  // namespace vizagent
