#include "vizagent/error.hpp"

namespace vizagent {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::IntegrityError: return "IntegrityError";
    case ErrorCode::TypeError: return "TypeError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownColumn: return "UnknownColumn";
    case ErrorCode::UnknownDesign: return "UnknownDesign";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NoEligibleDesign: return "NoEligibleDesign";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::UnsupportedKind: return "UnsupportedKind";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::ConnectionError: return "ConnectionError";
    case ErrorCode::HttpStatus: return "HttpStatus";
    case ErrorCode::FixtureMiss: return "FixtureMiss";
    case ErrorCode::MalformedResponse: return "MalformedResponse";
    case ErrorCode::NoSpecBlock: return "NoSpecBlock";
    case ErrorCode::SpecParseError: return "SpecParseError";
    case ErrorCode::SpecInvariantError: return "SpecInvariantError";
    case ErrorCode::ReportMismatch: return "ReportMismatch";
    case ErrorCode::ContractError: return "ContractError";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ZeroBaseline: return "ZeroBaseline";
    case ErrorCode::DuplicateScore: return "DuplicateScore";
    case ErrorCode::ScoreParseError: return "ScoreParseError";
    case ErrorCode::UnknownStudy: return "UnknownStudy";
    case ErrorCode::UnknownResult: return "UnknownResult";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

bool is_user_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Timeout:
    case ErrorCode::ConnectionError:
    case ErrorCode::HttpStatus:
    case ErrorCode::MalformedResponse:
    case ErrorCode::IoError:
      return false;
    default:
      return true;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      detail_(message) {}

Error Error::with_stage(std::string stage) const {
  Error copy(code_, "[" + stage + "] " + detail_);
  copy.detail_ = detail_;
  copy.stage_ = std::move(stage);
  copy.http_status_ = http_status_;
  return copy;
}

Error Error::with_http_status(int status) const {
  Error copy = *this;
  copy.http_status_ = status;
  return copy;
}

}  // namespace vizagent
