#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace vizagent {

using DesignId = std::uint64_t;

// A cell of the study table. std::monostate is the explicit missing marker
// (a failed evaluation stored as null in the file).
using Value = std::variant<std::monostate, double, std::string>;

inline bool is_missing(const Value& v) { return std::holds_alternative<std::monostate>(v); }

enum class VariableKind { Continuous, Categorical };
enum class Direction { Minimize, Maximize };
enum class Relation { LessEqual, GreaterEqual };
enum class ColumnRole { Variable, Objective, Response };

std::string_view to_string(Direction d) noexcept;
std::string_view to_string(Relation r) noexcept;
std::string_view to_string(ColumnRole r) noexcept;

struct VariableDef {
  std::string name;
  VariableKind kind = VariableKind::Continuous;
  std::optional<std::pair<double, double>> bounds;
  // Declaration order is the category order used on parallel axes.
  std::vector<std::string> categories;

  bool operator==(const VariableDef&) const = default;
};

struct ObjectiveDef {
  std::string name;
  Direction direction = Direction::Minimize;

  bool operator==(const ObjectiveDef&) const = default;
};

struct ConstraintDef {
  std::string name;
  std::string target;
  Relation relation = Relation::LessEqual;
  double bound = 0.0;

  bool operator==(const ConstraintDef&) const = default;
};

struct DesignRecord {
  DesignId design_id = 0;
  std::map<std::string, Value> values;

  bool operator==(const DesignRecord&) const = default;
};

struct ColumnInfo {
  std::string name;
  ColumnRole role;
  bool numeric;
};

struct Study {
  std::string id;
  std::string title;
  std::vector<VariableDef> variables;
  std::vector<ObjectiveDef> objectives;
  std::vector<std::string> responses;
  std::vector<ConstraintDef> constraints;
  std::vector<DesignRecord> designs;

  bool operator==(const Study&) const = default;

  // Columns in declaration order: variables, objectives, responses.
  std::vector<ColumnInfo> columns() const;
  std::optional<ColumnInfo> column(std::string_view name) const;
  const ObjectiveDef* objective(std::string_view name) const;
  const VariableDef* variable(std::string_view name) const;
  const DesignRecord* design(DesignId id) const;
};

// Throws Error{SchemaError | IntegrityError | TypeError} on any violation.
void validate_study(const Study& study);

Study load_study(std::string_view json_text);
Study load_study_file(const std::string& path);

// Canonical serialization; load_study(export_study(s)) == s.
std::string export_study(const Study& study);

// CSV ingestion. The manifest is JSON:
//   {"roles": {column: "variable"|"objective:min"|"objective:max"|"response"|"design_id"},
//    "id"?, "title"?, "categories"?: {column: [labels]}, "bounds"?: {column: [lo, hi]},
//    "constraints"?: [{name, target, relation, bound}]}
// Variables without a "categories" entry are continuous; missing bounds default
// to the observed range. Empty cells are missing values.
Study load_csv(std::string_view table, std::string_view manifest_json);

struct CsvExport {
  std::string table;
  std::string manifest;
};
CsvExport export_csv(const Study& study);

struct SeriesPoint {
  DesignId design_id;
  Value value;
};

struct ColumnSeries {
  std::vector<SeriesPoint> points;       // design_id order, missing values omitted
  std::vector<DesignId> missing_ids;     // designs whose value was null
};

ColumnSeries column_series(const Study& study, std::string_view column);

// Numeric view of column_series; throws TypeError for categorical columns.
struct NumericSeries {
  std::vector<DesignId> ids;
  std::vector<double> values;
  std::vector<DesignId> missing_ids;
};
NumericSeries numeric_series(const Study& study, std::string_view column);

// A design with a missing value in a constrained column counts as infeasible.
bool is_feasible(const Study& study, DesignId design_id);
std::vector<bool> feasibility_mask(const Study& study);

}  // namespace vizagent
