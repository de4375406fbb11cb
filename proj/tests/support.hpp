#pragma once

#include "vizagent/study.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cctype>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace vizagent::testing {

inline std::string fixture(const std::string& name) { return std::string(VIZAGENT_TEST_FIXTURES) + "/" + name; }
inline std::string data_dir() { return std::string(VIZAGENT_TEST_DATA); }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "vizagent") {
    static std::atomic<int> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            (tag + "-" + std::to_string(stamp) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string str() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

// Small hand-built study: one variable, objective Mass (minimize),
// response Stress with constraint Stress <= 100.
inline Study tiny_study(std::vector<double> mass, std::vector<double> stress) {
  Study s;
  s.id = "tiny";
  s.title = "Tiny";
  s.variables.push_back({"Width", VariableKind::Continuous, std::pair{0.0, 10.0}, {}});
  s.objectives.push_back({"Mass", Direction::Minimize});
  s.responses.push_back("Stress");
  s.constraints.push_back({"stress_limit", "Stress", Relation::LessEqual, 100.0});
  for (std::size_t i = 0; i < mass.size(); ++i) {
    DesignRecord d;
    d.design_id = i;
    d.values["Width"] = static_cast<double>(i % 10);
    d.values["Mass"] = mass[i];
    d.values["Stress"] = stress[i];
    s.designs.push_back(std::move(d));
  }
  return s;
}

// Randomized but valid study: mixed variable kinds, 1-3 objectives with
// either direction, optional responses with sporadic missing values, wide
// magnitude spread so scale-disparity paths fire, and tails that sometimes
// settle so both convergence verdicts occur.
inline Study random_study(std::mt19937_64& rng, int serial) {
  std::uniform_int_distribution<int> n_obj(1, 3), n_cont(1, 3), n_cat(0, 2), n_resp(0, 2), n_con(0, 3);
  std::uniform_int_distribution<int> n_designs(3, 40);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> exponent(-2, 5);

  Study s;
  s.id = "random-" + std::to_string(serial);
  s.title = "Random study " + std::to_string(serial);
  const int conts = n_cont(rng), cats = n_cat(rng), objs = n_obj(rng);
  // At least three columns so every plot kind has enough axes.
  const int resps = std::max(n_resp(rng), 3 - conts - cats - objs);
  for (int i = 0; i < conts; ++i) {
    s.variables.push_back({"Var_" + std::to_string(i), VariableKind::Continuous, std::pair{0.0, 1.0}, {}});
  }
  for (int i = 0; i < cats; ++i) {
    VariableDef v{"Choice_" + std::to_string(i), VariableKind::Categorical, std::nullopt, {}};
    const int k = 2 + static_cast<int>(unit(rng) * 3);
    for (int c = 0; c < k; ++c) v.categories.push_back("Opt" + std::to_string(c));
    s.variables.push_back(std::move(v));
  }
  for (int i = 0; i < objs; ++i) {
    s.objectives.push_back({"Objective_" + std::to_string(i), unit(rng) < 0.5 ? Direction::Minimize : Direction::Maximize});
  }
  for (int i = 0; i < resps; ++i) s.responses.push_back("Response_" + std::to_string(i));

  std::vector<std::string> numeric;
  for (const auto& c : s.columns()) {
    if (c.numeric && c.role != ColumnRole::Variable) numeric.push_back(c.name);
  }
  std::map<std::string, double> scale;
  std::map<std::string, bool> settles;
  for (const auto& name : numeric) {
    scale[name] = std::pow(10.0, exponent(rng));
    settles[name] = unit(rng) < 0.5;
  }

  const int n = n_designs(rng);
  for (int d = 0; d < n; ++d) {
    DesignRecord rec;
    rec.design_id = static_cast<DesignId>(d * (1 + serial % 3) + 1);
    for (const auto& v : s.variables) {
      if (v.kind == VariableKind::Continuous) rec.values[v.name] = unit(rng);
      else rec.values[v.name] = v.categories[static_cast<std::size_t>(unit(rng) * v.categories.size()) % v.categories.size()];
    }
    for (const auto& name : numeric) {
      const bool tail = settles[name] && d >= n - 12;
      const double base = tail ? 5.0 : 1.0 + 9.0 * unit(rng);
      rec.values[name] = base * scale[name];
    }
    for (const auto& r : s.responses) {
      if (unit(rng) < 0.1) rec.values[r] = std::monostate{};
    }
    s.designs.push_back(std::move(rec));
  }

  const int constraints = std::min<int>(n_con(rng), static_cast<int>(numeric.size()));
  for (int i = 0; i < constraints; ++i) {
    const auto& target = numeric[static_cast<std::size_t>(i)];
    s.constraints.push_back({"limit_" + std::to_string(i), target, unit(rng) < 0.5 ? Relation::LessEqual : Relation::GreaterEqual,
                             5.0 * scale[target]});
  }
  return s;
}

// Prompt for a supported class that names a few of the study's columns
// (as lowercase words, the way a user would type them).
inline std::string random_prompt(std::mt19937_64& rng, const Study& s, int cls) {
  static const char* history[] = {"Please generate a history plot to check convergence.",
                                  "show the optimization history of", "plot convergence over iterations for"};
  static const char* relation[] = {"please generate a 2d relation plot with variables", "scatter plot of",
                                   "show the trade-off between"};
  static const char* parallel[] = {"Please generate a parallel plot.", "parallel coordinates plot of", "radial plot with"};
  const char* const* pool = cls == 0 ? history : cls == 1 ? relation : parallel;
  std::uniform_int_distribution<int> pick(0, 2);
  const int which = pick(rng);
  std::string prompt = pool[which];
  if (which == 0) return prompt;

  auto cols = s.columns();
  std::shuffle(cols.begin(), cols.end(), rng);
  std::uniform_int_distribution<std::size_t> count(1, std::min<std::size_t>(cols.size(), 4));
  const std::size_t k = count(rng);
  for (std::size_t i = 0; i < k; ++i) {
    std::string words = cols[i].name;
    std::replace(words.begin(), words.end(), '_', ' ');
    std::transform(words.begin(), words.end(), words.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    prompt += (i == 0 ? " " : i + 1 == k ? " and " : ", ") + words;
  }
  return prompt;
}

}  // namespace vizagent::testing
