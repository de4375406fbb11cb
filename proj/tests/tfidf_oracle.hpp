#pragma once

// Reference TF-IDF cosine scorer written independently of the index: regex
// tokenization, dense vectors over the full vocabulary, long double sums.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <regex>
#include <string>
#include <vector>

namespace vizagent::testing {

struct OracleDoc {
  std::string id;
  std::string text;
};

struct OracleHit {
  std::string id;
  long double score;
};

inline std::vector<std::string> oracle_tokens(const std::string& text) {
  static const std::regex word("[A-Za-z0-9]+");
  std::vector<std::string> out;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), word); it != std::sregex_iterator(); ++it) {
    std::string t = it->str();
    if (t.size() < 2) continue;
    for (auto& c : t) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    out.push_back(t);
  }
  return out;
}

inline std::vector<OracleHit> oracle_rank(const std::vector<OracleDoc>& docs, const std::string& query) {
  std::map<std::string, std::size_t> vocab_index;
  std::vector<std::map<std::string, int>> tf(docs.size());
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const auto& t : oracle_tokens(docs[d].text)) ++tf[d][t];
  }
  std::map<std::string, int> df;
  for (const auto& counts : tf) {
    for (const auto& [t, _] : counts) ++df[t];
  }
  std::vector<std::string> vocab;
  for (const auto& [t, _] : df) vocab.push_back(t);
  const long double n = static_cast<long double>(docs.size());
  auto idf = [&](const std::string& t) { return std::log((n + 1.0L) / (df[t] + 1.0L)) + 1.0L; };

  std::map<std::string, int> qtf;
  for (const auto& t : oracle_tokens(query)) ++qtf[t];
  std::vector<long double> qv(vocab.size(), 0.0L);
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    auto it = qtf.find(vocab[i]);
    if (it != qtf.end()) qv[i] = it->second * idf(vocab[i]);
  }
  long double qn = 0.0L;
  for (auto v : qv) qn += v * v;
  qn = std::sqrt(qn);

  std::vector<OracleHit> hits;
  if (qn == 0.0L) return hits;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    long double dot = 0.0L, dn = 0.0L;
    bool shared = false;
    for (std::size_t i = 0; i < vocab.size(); ++i) {
      auto it = tf[d].find(vocab[i]);
      const long double w = it == tf[d].end() ? 0.0L : it->second * idf(vocab[i]);
      dn += w * w;
      dot += w * qv[i];
      shared = shared || (w > 0.0L && qv[i] > 0.0L);
    }
    if (shared) hits.push_back({docs[d].id, dot / (qn * std::sqrt(dn))});
  }
  std::sort(hits.begin(), hits.end(), [](const OracleHit& a, const OracleHit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  });
  return hits;
}

}  // namespace vizagent::testing
