#include "vizagent/knowledge.hpp"

#include "vizagent/error.hpp"
#include "vizagent/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <set>

namespace vizagent {

using nlohmann::json;

std::vector<std::string> tokenize_terms(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    if (current.size() >= 2) out.push_back(current);
    current.clear();
  };
  for (char c : text) {
    const auto uc = static_cast<unsigned char>(c);
    if (uc < 0x80 && std::isalnum(uc)) current.push_back(static_cast<char>(std::tolower(uc)));
    else flush();
  }
  flush();
  return out;
}

double smoothed_idf(std::size_t documents, std::size_t document_frequency) {
  return std::log(static_cast<double>(documents + 1) / static_cast<double>(document_frequency + 1)) + 1.0;
}

namespace {

std::map<std::string, std::size_t> term_counts(std::string_view text) {
  std::map<std::string, std::size_t> counts;
  for (auto& t : tokenize_terms(text)) ++counts[t];
  return counts;
}

}  // namespace

Index Index::build(std::vector<Document> docs) {
  if (docs.empty()) throw Error(ErrorCode::EmptyCorpus, "cannot index an empty corpus");
  std::sort(docs.begin(), docs.end(), [](const Document& a, const Document& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (docs[i].id.empty()) throw Error(ErrorCode::SchemaError, "document with empty id");
    if (trim(docs[i].text).empty()) throw Error(ErrorCode::SchemaError, "document '" + docs[i].id + "' has no text");
    if (i > 0 && docs[i].id == docs[i - 1].id) throw Error(ErrorCode::DuplicateId, "duplicate document id '" + docs[i].id + "'");
  }

  Index index;
  std::vector<std::map<std::string, std::size_t>> counts;
  counts.reserve(docs.size());
  for (const auto& d : docs) {
    counts.push_back(term_counts(d.text));
    for (const auto& [term, _] : counts.back()) ++index.df_[term];
  }
  const std::size_t n = docs.size();
  for (const auto& c : counts) {
    Weights w;
    double sq = 0.0;
    for (const auto& [term, tf] : c) {
      const double weight = static_cast<double>(tf) * smoothed_idf(n, index.df_.at(term));
      w.terms.emplace(term, weight);
      sq += weight * weight;
    }
    w.norm = std::sqrt(sq);
    index.weights_.push_back(std::move(w));
  }
  index.docs_ = std::move(docs);
  return index;
}

std::size_t Index::document_frequency(const std::string& term) const {
  auto it = df_.find(term);
  return it == df_.end() ? 0 : it->second;
}

const Document* Index::document(std::string_view id) const {
  auto it = std::lower_bound(docs_.begin(), docs_.end(), id,
                             [](const Document& d, std::string_view key) { return d.id < key; });
  if (it == docs_.end() || it->id != id) return nullptr;
  return &*it;
}

std::vector<RetrievalResult> Index::retrieve(std::string_view query, std::size_t k,
                                             std::optional<RequestClass> filter) const {
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be positive");
  std::map<std::string, double> q;
  double q_sq = 0.0;
  for (const auto& [term, tf] : term_counts(query)) {
    auto it = df_.find(term);
    if (it == df_.end()) continue;
    const double w = static_cast<double>(tf) * smoothed_idf(docs_.size(), it->second);
    q.emplace(term, w);
    q_sq += w * w;
  }
  std::vector<RetrievalResult> hits;
  if (q.empty()) return hits;
  const double q_norm = std::sqrt(q_sq);

  for (std::size_t i = 0; i < docs_.size(); ++i) {
    if (filter && docs_[i].plot_kind && *docs_[i].plot_kind != *filter) continue;
    const auto& w = weights_[i];
    double dot = 0.0;
    bool overlap = false;
    for (const auto& [term, qw] : q) {
      auto it = w.terms.find(term);
      if (it == w.terms.end()) continue;
      overlap = true;
      dot += qw * it->second;
    }
    if (!overlap || w.norm == 0.0) continue;
    hits.push_back({docs_[i].id, dot / (q_norm * w.norm), 0});
  }
  std::sort(hits.begin(), hits.end(), [](const RetrievalResult& a, const RetrievalResult& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.document_id < b.document_id;
  });
  if (hits.size() > k) hits.resize(k);
  for (std::size_t i = 0; i < hits.size(); ++i) hits[i].rank = i + 1;
  return hits;
}

std::string Index::to_json() const {
  json j;
  j["format"] = "vizagent-tfidf-index";
  j["version"] = 1;
  j["document_count"] = docs_.size();
  j["document_frequency"] = df_;
  json docs = json::array();
  for (std::size_t i = 0; i < docs_.size(); ++i) {
    const auto& d = docs_[i];
    docs.push_back({{"id", d.id},
                    {"text", d.text},
                    {"tags", d.tags},
                    {"plot_kind", d.plot_kind ? json(std::string(to_string(*d.plot_kind))) : json(nullptr)},
                    {"weights", weights_[i].terms},
                    {"norm", weights_[i].norm}});
  }
  j["documents"] = std::move(docs);
  return j.dump(1) + "\n";
}

Index Index::from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    if (j.at("format") != "vizagent-tfidf-index") throw Error(ErrorCode::SchemaError, "index: unknown format");
    Index index;
    index.df_ = j.at("document_frequency").get<std::map<std::string, std::size_t>>();
    for (const auto& d : j.at("documents")) {
      Document doc;
      doc.id = d.at("id").get<std::string>();
      doc.text = d.at("text").get<std::string>();
      doc.tags = d.at("tags").get<std::vector<std::string>>();
      if (!d.at("plot_kind").is_null()) {
        doc.plot_kind = request_class_from_string(d.at("plot_kind").get<std::string>());
      }
      index.docs_.push_back(std::move(doc));
      Weights w;
      w.terms = d.at("weights").get<std::map<std::string, double>>();
      w.norm = d.at("norm").get<double>();
      index.weights_.push_back(std::move(w));
    }
    if (index.docs_.size() != j.at("document_count").get<std::size_t>()) {
      throw Error(ErrorCode::SchemaError, "index: document_count does not match documents");
    }
    return index;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string("index: ") + e.what());
  }
}

Document parse_snippet(std::string_view content, const std::string& source) {
  const auto lines = split(content, '\n');
  if (lines.empty() || trim(lines[0]) != "---") {
    throw Error(ErrorCode::ParseError, source + ": missing front-matter opener '---'");
  }
  Document doc;
  std::size_t i = 1;
  bool closed = false;
  for (; i < lines.size(); ++i) {
    const std::string line = trim(lines[i]);
    if (line == "---") {
      closed = true;
      ++i;
      break;
    }
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw Error(ErrorCode::ParseError, source + ":" + std::to_string(i + 1) + ": expected 'key: value'");
    const std::string key = trim(line.substr(0, colon));
    std::string value = trim(line.substr(colon + 1));
    if (key == "id") {
      doc.id = value;
    } else if (key == "tags") {
      if (!value.empty() && value.front() == '[' && value.back() == ']') value = value.substr(1, value.size() - 2);
      for (auto& t : split(value, ',')) {
        auto tag = trim(t);
        if (!tag.empty()) doc.tags.push_back(std::move(tag));
      }
    } else if (key == "plot_kind") {
      if (!value.empty() && value != "any") {
        doc.plot_kind = request_class_from_string(value);
        if (!doc.plot_kind) throw Error(ErrorCode::ParseError, source + ": unknown plot_kind '" + value + "'");
      }
    } else {
      throw Error(ErrorCode::ParseError, source + ": unknown front-matter key '" + key + "'");
    }
  }
  if (!closed) throw Error(ErrorCode::ParseError, source + ": front matter not closed");
  if (doc.id.empty()) throw Error(ErrorCode::ParseError, source + ": front matter lacks an id");
  std::string body;
  for (; i < lines.size(); ++i) {
    body += lines[i];
    if (i + 1 < lines.size()) body += '\n';
  }
  doc.text = trim(body);
  return doc;
}

std::vector<Document> load_corpus(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error(ErrorCode::IoError, "corpus directory '" + dir + "' not found");
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension().string();
    if (ext == ".md" || ext == ".txt") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Document> docs;
  for (const auto& f : files) docs.push_back(parse_snippet(read_file(f.string()), f.string()));
  return docs;
}

}  // namespace vizagent
