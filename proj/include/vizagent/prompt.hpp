#pragma once

#include "vizagent/analysis.hpp"
#include "vizagent/knowledge.hpp"
#include "vizagent/router.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace vizagent {

enum class Severity { Error, Warning };
std::string_view to_string(Severity s) noexcept;

struct GuidelineRule {
  std::string id;
  std::string text;
  Severity severity = Severity::Error;

  bool operator==(const GuidelineRule&) const = default;
};

struct GuidelineSet {
  RequestClass kind = RequestClass::Unsupported;
  int version = 1;
  std::vector<GuidelineRule> rules;

  const GuidelineRule* rule(std::string_view id) const;
  bool operator==(const GuidelineSet&) const = default;
};

// Guideline file: {"kind": "HistoryPlot", "version": 1,
//                  "rules": [{"id": "H1", "text": "...", "severity": "error"|"warning"}]}
GuidelineSet parse_guideline_set(std::string_view json_text, const std::string& source = "guidelines");

class GuidelineCatalog {
 public:
  // Loads every *.json file in dir; each must declare a distinct supported kind.
  static GuidelineCatalog load_directory(const std::string& dir);
  static const GuidelineCatalog& default_catalog();

  // Throws UnsupportedKind for Unsupported or a kind without a file.
  const GuidelineSet& guidelines_for(RequestClass kind) const;

 private:
  std::map<RequestClass, GuidelineSet> sets_;
};

// Resource root holding guidelines/, corpus/ and prompts/. VIZAGENT_RESOURCES
// overrides the build-time location.
std::string resource_dir();

const GuidelineSet& guidelines_for(RequestClass kind);

struct PromptBundle {
  std::string system_text;
  std::string output_contract;
  std::string guideline_text;
  std::string report_text;
  std::vector<std::string> snippet_ids;
  std::vector<std::string> snippet_texts;
  std::string user_text;
  std::string assembled;
  std::vector<std::string> dropped_snippets;

  // Everything before the user section; sent as the system message over HTTP.
  std::string system_message() const;
};

struct AssembleOptions {
  // 0 disables the limit. Snippets are dropped from the lowest rank upward;
  // guidelines and the report are never dropped.
  std::size_t max_length = 0;
};

std::string default_system_text();
std::string output_contract_text();
std::string render_guidelines(const GuidelineSet& guidelines);

PromptBundle assemble(std::string_view system, const GuidelineSet& guidelines, const AnalysisReport& report,
                      const std::vector<Document>& snippets, std::string_view user,
                      const AssembleOptions& options = {});

// Bundle with only a system and a user section (assessor prompts, classifier fallback).
PromptBundle simple_bundle(std::string_view system, std::string_view user);

inline constexpr std::string_view kSectionMarker = "### SECTION: ";
inline constexpr std::string_view kNoExamplesMarker = "(no examples retrieved)";

}  // namespace vizagent
