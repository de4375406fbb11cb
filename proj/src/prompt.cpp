#include "vizagent/prompt.hpp"

#include "vizagent/error.hpp"
#include "vizagent/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <mutex>
#include <set>

#ifndef VIZAGENT_RESOURCE_DIR
#define VIZAGENT_RESOURCE_DIR "data"
#endif

namespace vizagent {

using nlohmann::json;

std::string_view to_string(Severity s) noexcept { return s == Severity::Error ? "error" : "warning"; }

const GuidelineRule* GuidelineSet::rule(std::string_view id) const {
  for (const auto& r : rules) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

GuidelineSet parse_guideline_set(std::string_view json_text, const std::string& source) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, source + ": not valid JSON (" + e.what() + ")");
  }
  GuidelineSet set;
  try {
    const auto kind = request_class_from_string(j.at("kind").get<std::string>());
    if (!kind || *kind == RequestClass::Unsupported) throw Error(ErrorCode::SchemaError, source + "/kind: not a plot kind");
    set.kind = *kind;
    set.version = j.value("version", 1);
    std::set<std::string> ids;
    for (const auto& r : j.at("rules")) {
      GuidelineRule rule;
      rule.id = r.at("id").get<std::string>();
      rule.text = r.at("text").get<std::string>();
      const auto sev = r.value("severity", std::string("error"));
      if (sev != "error" && sev != "warning") throw Error(ErrorCode::SchemaError, source + ": severity of " + rule.id + " must be error|warning");
      rule.severity = sev == "error" ? Severity::Error : Severity::Warning;
      if (rule.id.empty() || rule.text.empty()) throw Error(ErrorCode::SchemaError, source + ": rule with empty id or text");
      if (!ids.insert(rule.id).second) throw Error(ErrorCode::SchemaError, source + ": duplicate rule id " + rule.id);
      set.rules.push_back(std::move(rule));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaError, source + ": " + e.what());
  }
  return set;
}

GuidelineCatalog GuidelineCatalog::load_directory(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error(ErrorCode::IoError, "guideline directory '" + dir + "' not found");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  GuidelineCatalog catalog;
  for (const auto& f : files) {
    auto set = parse_guideline_set(read_file(f.string()), f.string());
    const auto kind = set.kind;
    if (!catalog.sets_.emplace(kind, std::move(set)).second) {
      throw Error(ErrorCode::SchemaError, f.string() + ": second guideline file for " + std::string(to_string(kind)));
    }
  }
  return catalog;
}

std::string resource_dir() {
  if (const char* env = std::getenv("VIZAGENT_RESOURCES"); env && *env) return env;
  return VIZAGENT_RESOURCE_DIR;
}

const GuidelineCatalog& GuidelineCatalog::default_catalog() {
  static const GuidelineCatalog catalog = load_directory(resource_dir() + "/guidelines");
  return catalog;
}

const GuidelineSet& GuidelineCatalog::guidelines_for(RequestClass kind) const {
  auto it = sets_.find(kind);
  if (it == sets_.end()) throw Error(ErrorCode::UnsupportedKind, "no guidelines for " + std::string(to_string(kind)));
  return it->second;
}

const GuidelineSet& guidelines_for(RequestClass kind) {
  if (kind == RequestClass::Unsupported) throw Error(ErrorCode::UnsupportedKind, "no guidelines for Unsupported requests");
  return GuidelineCatalog::default_catalog().guidelines_for(kind);
}

namespace {

const std::string& cached_resource(const std::string& relative) {
  static std::mutex mu;
  static std::map<std::string, std::string> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(relative);
  if (it == cache.end()) it = cache.emplace(relative, trim(read_file(resource_dir() + "/" + relative))).first;
  return it->second;
}

constexpr std::string_view kUserSection = "USER REQUEST";

std::string section(std::string_view name) { return std::string(kSectionMarker) + std::string(name) + "\n"; }

std::string build(const PromptBundle& b) {
  std::string out;
  out += section("SYSTEM");
  out += b.system_text + "\n\n" + b.output_contract + "\n\n";
  out += section("GUIDELINES");
  out += b.guideline_text + "\n";
  out += section("ANALYSIS REPORT");
  out += b.report_text + "\n";
  out += section("RETRIEVED EXAMPLES");
  if (b.snippet_texts.empty()) {
    out += std::string(kNoExamplesMarker) + "\n\n";
  } else {
    for (std::size_t i = 0; i < b.snippet_texts.size(); ++i) {
      out += "#### EXAMPLE " + std::to_string(i + 1) + ": " + b.snippet_ids[i] + "\n" + b.snippet_texts[i] + "\n\n";
    }
  }
  out += section(kUserSection);
  out += b.user_text + "\n";
  return out;
}

}  // namespace

std::string default_system_text() { return cached_resource("prompts/system.txt"); }
std::string output_contract_text() { return cached_resource("prompts/output_contract.txt"); }

std::string render_guidelines(const GuidelineSet& g) {
  std::string out = "Visualization rules for " + std::string(to_string(g.kind)) + " (v" + std::to_string(g.version) + "):\n";
  for (const auto& r : g.rules) out += "[" + r.id + "] (" + std::string(to_string(r.severity)) + ") " + r.text + "\n";
  return out;
}

std::string PromptBundle::system_message() const {
  const auto pos = assembled.find(std::string(kSectionMarker) + std::string(kUserSection));
  return assembled.substr(0, pos);
}

PromptBundle assemble(std::string_view system, const GuidelineSet& guidelines, const AnalysisReport& report,
                      const std::vector<Document>& snippets, std::string_view user, const AssembleOptions& options) {
  PromptBundle b;
  b.system_text = std::string(system);
  b.output_contract = output_contract_text();
  b.guideline_text = render_guidelines(guidelines);
  b.report_text = report.rendered_text;
  for (const auto& d : snippets) {
    b.snippet_ids.push_back(d.id);
    b.snippet_texts.push_back(d.text);
  }
  b.user_text = std::string(user);
  b.assembled = build(b);
  while (options.max_length > 0 && b.assembled.size() > options.max_length && !b.snippet_texts.empty()) {
    b.dropped_snippets.insert(b.dropped_snippets.begin(), b.snippet_ids.back());
    b.snippet_ids.pop_back();
    b.snippet_texts.pop_back();
    b.assembled = build(b);
  }
  return b;
}

PromptBundle simple_bundle(std::string_view system, std::string_view user) {
  PromptBundle b;
  b.system_text = std::string(system);
  b.user_text = std::string(user);
  b.assembled = section("SYSTEM") + b.system_text + "\n\n" + section(kUserSection) + b.user_text + "\n";
  return b;
}

}  // namespace vizagent
