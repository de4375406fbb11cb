#include "vizagent/router.hpp"

#include "vizagent/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>

namespace vizagent {

std::string_view to_string(RequestClass c) noexcept {
  switch (c) {
    case RequestClass::HistoryPlot: return "HistoryPlot";
    case RequestClass::Relation2D: return "Relation2D";
    case RequestClass::ParallelPlot: return "ParallelPlot";
    case RequestClass::Unsupported: return "Unsupported";
  }
  return "Unsupported";
}

std::optional<RequestClass> request_class_from_string(std::string_view s) noexcept {
  for (auto c : {RequestClass::HistoryPlot, RequestClass::Relation2D, RequestClass::ParallelPlot,
                 RequestClass::Unsupported}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

namespace {

struct Token {
  std::string text;
  std::size_t segment;
};

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

bool is_segment_break(char c) {
  switch (c) {
    case ',': case '.': case ';': case ':': case '!': case '?':
    case '(': case ')': case '[': case ']': case '\n':
      return true;
    default:
      return false;
  }
}

std::vector<Token> tokenize_prompt(std::string_view prompt) {
  std::vector<Token> tokens;
  std::size_t segment = 0;
  std::string current;
  for (char c : prompt) {
    if (is_word_char(c)) {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      continue;
    }
    if (!current.empty()) {
      tokens.push_back({std::move(current), segment});
      current.clear();
    }
    if (is_segment_break(c)) ++segment;
  }
  if (!current.empty()) tokens.push_back({std::move(current), segment});
  return tokens;
}

std::vector<std::string> tokenize_name(std::string_view name) {
  std::vector<std::string> out;
  std::string current;
  for (char c : name) {
    if (is_word_char(c)) {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!current.empty()) {
      out.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

std::string concat(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += p;
  return out;
}

bool prefix_compatible(const std::string& a, const std::string& b, std::size_t min_prefix) {
  if (a == b) return true;
  const auto& shorter = a.size() < b.size() ? a : b;
  const auto& longer = a.size() < b.size() ? b : a;
  return shorter.size() >= min_prefix && longer.compare(0, shorter.size(), shorter) == 0;
}

const std::set<std::string>& filler_words() {
  static const std::set<std::string> words = {
      "a", "an", "the", "and", "or", "of", "for", "to", "with", "in", "on", "at", "by", "from", "into", "as",
      "is", "are", "be", "this", "that", "these", "those", "it", "its", "my", "our", "me", "i", "we", "you",
      "your", "please", "pls", "generate", "create", "make", "build", "produce", "show", "display", "draw",
      "render", "visualize", "visualise", "plot", "plots", "chart", "charts", "graph", "graphs", "figure",
      "diagram", "check", "verify", "see", "python", "code", "script", "variable", "variables", "objective",
      "objectives", "response", "responses", "column", "columns", "vs", "versus", "against", "between", "over",
      "all", "each", "every", "using", "use", "data", "study", "design", "designs", "value", "values", "can",
      "could", "would", "should", "will", "want", "need", "like", "give", "get", "let", "help", "how", "what",
      "which", "whether", "if", "do", "does", "optimization", "optimisation", "run", "result", "results",
      "history", "convergence", "converge", "converged", "converging", "iteration", "iterations", "relation",
      "relationship", "scatter", "trade", "off", "tradeoff", "tradeoffs", "2d", "parallel", "radial", "spider",
      "best", "some", "now", "also", "then", "so", "not"};
  return words;
}

struct Pattern {
  RequestClass cls;
  std::vector<std::string> tokens;
  double weight;
};

const std::vector<Pattern>& patterns() {
  static const std::vector<Pattern> table = {
      {RequestClass::HistoryPlot, {"history"}, 1.0},
      {RequestClass::HistoryPlot, {"convergence"}, 0.8},
      {RequestClass::HistoryPlot, {"converge"}, 0.8},
      {RequestClass::HistoryPlot, {"converged"}, 0.8},
      {RequestClass::HistoryPlot, {"converging"}, 0.8},
      {RequestClass::HistoryPlot, {"iteration"}, 0.6},
      {RequestClass::HistoryPlot, {"iterations"}, 0.6},
      {RequestClass::Relation2D, {"relation"}, 1.0},
      {RequestClass::Relation2D, {"relationship"}, 1.0},
      {RequestClass::Relation2D, {"scatter"}, 0.8},
      {RequestClass::Relation2D, {"trade", "off"}, 0.8},
      {RequestClass::Relation2D, {"tradeoff"}, 0.8},
      {RequestClass::Relation2D, {"tradeoffs"}, 0.8},
      {RequestClass::Relation2D, {"2d"}, 0.6},
      {RequestClass::ParallelPlot, {"parallel"}, 1.0},
      {RequestClass::ParallelPlot, {"radial"}, 0.8},
      {RequestClass::ParallelPlot, {"spider"}, 0.8},
  };
  return table;
}

bool contains_sequence(const std::vector<Token>& tokens, const std::vector<std::string>& seq) {
  if (seq.empty() || tokens.size() < seq.size()) return false;
  for (std::size_t i = 0; i + seq.size() <= tokens.size(); ++i) {
    bool ok = true;
    for (std::size_t k = 0; k < seq.size() && ok; ++k) ok = tokens[i + k].text == seq[k];
    if (ok) return true;
  }
  return false;
}

constexpr std::size_t kMaxMentionTokens = 8;

}  // namespace

Resolution resolve_columns(std::string_view prompt, const Study& study, const ResolveOptions& options) {
  struct Candidate {
    std::string name;
    std::vector<std::string> tokens;
    std::string normalized;
  };
  std::vector<Candidate> candidates;
  for (const auto& c : study.columns()) {
    auto toks = tokenize_name(c.name);
    candidates.push_back({c.name, toks, concat(toks)});
  }

  const auto tokens = tokenize_prompt(prompt);
  std::vector<bool> consumed(tokens.size(), false);
  std::set<std::string> matched;
  struct Hit {
    std::size_t start;
    std::string column;  // empty for an ambiguous mention
    std::string mention;
  };
  std::vector<Hit> hits;

  auto span_text = [&](std::size_t i, std::size_t n) {
    std::string s;
    for (std::size_t k = 0; k < n; ++k) s += (k ? " " : "") + tokens[i + k].text;
    return s;
  };

  for (std::size_t n = std::min(kMaxMentionTokens, tokens.size()); n >= 1; --n) {
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      bool free = true;
      for (std::size_t k = 0; k < n && free; ++k) {
        free = !consumed[i + k] && tokens[i + k].segment == tokens[i].segment;
      }
      if (!free) continue;

      std::vector<std::string> span;
      for (std::size_t k = 0; k < n; ++k) span.push_back(tokens[i + k].text);
      const std::string joined = concat(span);

      std::vector<const Candidate*> found;
      for (const auto& c : candidates) {
        if (c.normalized == joined) found.push_back(&c);
      }
      if (found.empty() && options.token_prefix) {
        for (const auto& c : candidates) {
          if (c.tokens.size() != n) continue;
          bool ok = true;
          for (std::size_t k = 0; k < n && ok; ++k) ok = prefix_compatible(span[k], c.tokens[k], options.min_prefix);
          if (ok) found.push_back(&c);
        }
      }
      if (found.empty()) continue;

      for (std::size_t k = 0; k < n; ++k) consumed[i + k] = true;
      if (found.size() > 1) {
        hits.push_back({i, {}, span_text(i, n)});
      } else if (matched.insert(found.front()->name).second) {
        hits.push_back({i, found.front()->name, span_text(i, n)});
      }
    }
    if (n == 1) break;
  }

  // Leftover runs of content words are mentions we could not ground.
  const auto& fillers = filler_words();
  for (std::size_t i = 0; i < tokens.size();) {
    if (consumed[i] || fillers.count(tokens[i].text)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < tokens.size() && !consumed[j] && !fillers.count(tokens[j].text) && tokens[j].segment == tokens[i].segment) {
      ++j;
    }
    hits.push_back({i, {}, span_text(i, j - i)});
    i = j;
  }

  std::stable_sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.start < b.start; });
  Resolution out;
  for (auto& h : hits) {
    if (h.column.empty()) out.unresolved.push_back(std::move(h.mention));
    else out.columns.push_back(std::move(h.column));
  }
  return out;
}

std::vector<std::string> default_columns(RequestClass c, const Study& study) {
  std::vector<std::string> out;
  switch (c) {
    case RequestClass::HistoryPlot:
      for (const auto& o : study.objectives) out.push_back(o.name);
      break;
    case RequestClass::Relation2D: {
      for (const auto& o : study.objectives) {
        if (out.size() < 2) out.push_back(o.name);
      }
      for (const auto& col : study.columns()) {
        if (out.size() >= 2) break;
        if (col.numeric && std::find(out.begin(), out.end(), col.name) == out.end()) out.push_back(col.name);
      }
      break;
    }
    case RequestClass::ParallelPlot:
      for (const auto& v : study.variables) out.push_back(v.name);
      for (const auto& o : study.objectives) out.push_back(o.name);
      break;
    case RequestClass::Unsupported:
      break;
  }
  return out;
}

ClassifiedRequest classify(std::string_view prompt, const Study& study, const ResolveOptions& options) {
  ClassifiedRequest req;
  req.raw_prompt = std::string(prompt);

  const auto tokens = tokenize_prompt(prompt);
  std::array<double, 3> score{0.0, 0.0, 0.0};
  for (const auto& p : patterns()) {
    if (contains_sequence(tokens, p.tokens)) score[static_cast<std::size_t>(p.cls)] += p.weight;
  }
  const double total = score[0] + score[1] + score[2];
  if (total <= 0.0) return req;

  std::size_t best = 0;
  for (std::size_t k = 1; k < score.size(); ++k) {
    if (score[k] > score[best]) best = k;
  }
  req.request_class = static_cast<RequestClass>(best);
  req.confidence = score[best] / total;

  auto res = resolve_columns(prompt, study, options);
  req.columns = res.columns.empty() ? default_columns(req.request_class, study) : std::move(res.columns);
  req.unresolved_mentions = std::move(res.unresolved);
  return req;
}

}  // namespace vizagent
