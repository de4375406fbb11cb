#pragma once

#include "vizagent/router.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vizagent {

struct Document {
  std::string id;
  std::string text;
  std::vector<std::string> tags;
  std::optional<RequestClass> plot_kind;  // unset: applies to every plot kind

  bool operator==(const Document&) const = default;
};

struct RetrievalResult {
  std::string document_id;
  double score = 0.0;
  std::size_t rank = 0;

  bool operator==(const RetrievalResult&) const = default;
};

// Lowercase, split on non-alphanumerics (ASCII), drop tokens shorter than 2.
std::vector<std::string> tokenize_terms(std::string_view text);

// idf(t) = ln((N + 1) / (df(t) + 1)) + 1, tf = raw count, w = tf * idf.
double smoothed_idf(std::size_t documents, std::size_t document_frequency);

class Index {
 public:
  static Index build(std::vector<Document> docs);

  // Top-k by cosine similarity; zero-overlap documents are never returned.
  // With a filter, documents tagged for another plot kind are excluded before
  // scoring; untagged documents stay eligible.
  std::vector<RetrievalResult> retrieve(std::string_view query, std::size_t k,
                                        std::optional<RequestClass> filter = std::nullopt) const;

  std::size_t document_count() const { return docs_.size(); }
  std::size_t document_frequency(const std::string& term) const;
  const std::map<std::string, std::size_t>& vocabulary() const { return df_; }
  const Document* document(std::string_view id) const;
  const std::vector<Document>& documents() const { return docs_; }

  std::string to_json() const;
  static Index from_json(std::string_view text);

  bool operator==(const Index&) const = default;

 private:
  struct Weights {
    std::map<std::string, double> terms;
    double norm = 0.0;
    bool operator==(const Weights&) const = default;
  };

  std::vector<Document> docs_;  // sorted by id
  std::vector<Weights> weights_;
  std::map<std::string, std::size_t> df_;
};

// Reads every *.md / *.txt file under dir (sorted by path). Each file starts
// with a front-matter block:
//   ---
//   id: history_basic
//   tags: history, convergence
//   plot_kind: HistoryPlot
//   ---
Document parse_snippet(std::string_view content, const std::string& source);
std::vector<Document> load_corpus(const std::string& dir);

}  // namespace vizagent
