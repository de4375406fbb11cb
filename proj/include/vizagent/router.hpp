#pragma once

#include "vizagent/study.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vizagent {

enum class RequestClass { HistoryPlot, Relation2D, ParallelPlot, Unsupported };

std::string_view to_string(RequestClass c) noexcept;
std::optional<RequestClass> request_class_from_string(std::string_view s) noexcept;

struct ClassifiedRequest {
  RequestClass request_class = RequestClass::Unsupported;
  std::vector<std::string> columns;  // resolved study columns, prompt order
  std::string raw_prompt;
  double confidence = 0.0;
  std::vector<std::string> unresolved_mentions;

  bool operator==(const ClassifiedRequest&) const = default;
};

struct ResolveOptions {
  // Token-prefix fallback ("torsional" -> "Torsion") after exact normalized matching.
  bool token_prefix = true;
  std::size_t min_prefix = 4;
};

struct Resolution {
  std::vector<std::string> columns;
  std::vector<std::string> unresolved;
};

Resolution resolve_columns(std::string_view prompt, const Study& study, const ResolveOptions& options = {});

// Deterministic keyword classifier. Each class accumulates the weights of its
// matched patterns; the winner's share of the total matched weight is the
// confidence. Ties resolve History > Relation2D > Parallel.
ClassifiedRequest classify(std::string_view prompt, const Study& study, const ResolveOptions& options = {});

// Column set used when the prompt names none.
std::vector<std::string> default_columns(RequestClass c, const Study& study);

}  // namespace vizagent
