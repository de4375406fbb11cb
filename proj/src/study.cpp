#include "vizagent/study.hpp"

#include "vizagent/error.hpp"
#include "vizagent/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

namespace vizagent {

using nlohmann::json;

std::string_view to_string(Direction d) noexcept {
  return d == Direction::Minimize ? "minimize" : "maximize";
}

std::string_view to_string(Relation r) noexcept { return r == Relation::LessEqual ? "<=" : ">="; }

std::string_view to_string(ColumnRole r) noexcept {
  switch (r) {
    case ColumnRole::Variable: return "variable";
    case ColumnRole::Objective: return "objective";
    case ColumnRole::Response: return "response";
  }
  return "variable";
}

std::vector<ColumnInfo> Study::columns() const {
  std::vector<ColumnInfo> out;
  out.reserve(variables.size() + objectives.size() + responses.size());
  for (const auto& v : variables) {
    out.push_back({v.name, ColumnRole::Variable, v.kind == VariableKind::Continuous});
  }
  for (const auto& o : objectives) out.push_back({o.name, ColumnRole::Objective, true});
  for (const auto& r : responses) out.push_back({r, ColumnRole::Response, true});
  return out;
}

std::optional<ColumnInfo> Study::column(std::string_view name) const {
  for (auto& c : columns()) {
    if (c.name == name) return c;
  }
  return std::nullopt;
}

const ObjectiveDef* Study::objective(std::string_view name) const {
  for (const auto& o : objectives) {
    if (o.name == name) return &o;
  }
  return nullptr;
}

const VariableDef* Study::variable(std::string_view name) const {
  for (const auto& v : variables) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

const DesignRecord* Study::design(DesignId id) const {
  auto it = std::lower_bound(designs.begin(), designs.end(), id,
                             [](const DesignRecord& d, DesignId key) { return d.design_id < key; });
  if (it == designs.end() || it->design_id != id) return nullptr;
  return &*it;
}

void validate_study(const Study& study) {
  if (study.id.empty()) throw Error(ErrorCode::SchemaError, "/id: study id must be non-empty");
  if (study.objectives.empty()) throw Error(ErrorCode::IntegrityError, "/objectives: at least one objective required");
  if (study.designs.empty()) throw Error(ErrorCode::IntegrityError, "/designs: at least one design required");

  std::set<std::string> names;
  auto claim = [&](const std::string& name, std::string_view where) {
    if (name.empty()) throw Error(ErrorCode::SchemaError, std::string(where) + ": empty column name");
    if (!names.insert(name).second) {
      throw Error(ErrorCode::IntegrityError, std::string(where) + ": duplicate column '" + name + "'");
    }
  };
  for (std::size_t i = 0; i < study.variables.size(); ++i) {
    const auto& v = study.variables[i];
    const std::string where = "/variables/" + std::to_string(i);
    claim(v.name, where);
    if (v.kind == VariableKind::Continuous) {
      if (!v.bounds) throw Error(ErrorCode::IntegrityError, where + ": continuous variable '" + v.name + "' needs bounds");
      if (!(v.bounds->first <= v.bounds->second)) {
        throw Error(ErrorCode::IntegrityError, where + ": bounds of '" + v.name + "' have lo > hi");
      }
    } else {
      if (v.categories.empty()) {
        throw Error(ErrorCode::IntegrityError, where + ": categorical variable '" + v.name + "' needs categories");
      }
      if (std::find(v.categories.begin(), v.categories.end(), std::string()) != v.categories.end()) {
        throw Error(ErrorCode::IntegrityError, where + ": empty category label in '" + v.name + "'");
      }
      std::set<std::string> seen(v.categories.begin(), v.categories.end());
      if (seen.size() != v.categories.size()) {
        throw Error(ErrorCode::IntegrityError, where + ": duplicate category label in '" + v.name + "'");
      }
    }
  }
  for (std::size_t i = 0; i < study.objectives.size(); ++i) {
    claim(study.objectives[i].name, "/objectives/" + std::to_string(i));
  }
  for (std::size_t i = 0; i < study.responses.size(); ++i) {
    claim(study.responses[i], "/responses/" + std::to_string(i));
  }

  std::set<std::string> constraint_names;
  for (std::size_t i = 0; i < study.constraints.size(); ++i) {
    const auto& c = study.constraints[i];
    const std::string where = "/constraints/" + std::to_string(i);
    if (!constraint_names.insert(c.name).second) {
      throw Error(ErrorCode::IntegrityError, where + ": duplicate constraint '" + c.name + "'");
    }
    auto col = study.column(c.target);
    if (!col) throw Error(ErrorCode::IntegrityError, where + ": target '" + c.target + "' is not a column");
    if (!col->numeric) throw Error(ErrorCode::IntegrityError, where + ": target '" + c.target + "' is categorical");
    if (!std::isfinite(c.bound)) throw Error(ErrorCode::IntegrityError, where + ": bound must be finite");
  }

  const auto cols = study.columns();
  for (std::size_t i = 0; i < study.designs.size(); ++i) {
    const auto& d = study.designs[i];
    const std::string where = "/designs/" + std::to_string(i);
    if (i > 0 && d.design_id <= study.designs[i - 1].design_id) {
      throw Error(ErrorCode::IntegrityError, where + ": design_id " + std::to_string(d.design_id) +
                                                 " is not strictly increasing");
    }
    for (const auto& [key, _] : d.values) {
      if (!names.count(key)) throw Error(ErrorCode::IntegrityError, where + "/values: undeclared column '" + key + "'");
    }
    for (const auto& col : cols) {
      auto it = d.values.find(col.name);
      if (it == d.values.end()) {
        throw Error(ErrorCode::IntegrityError, where + "/values: no value (or null) for column '" + col.name + "'");
      }
      const Value& v = it->second;
      if (is_missing(v)) continue;
      if (col.numeric) {
        if (!std::holds_alternative<double>(v)) {
          throw Error(ErrorCode::TypeError, where + "/values/" + col.name + ": label '" + std::get<std::string>(v) +
                                                "' in continuous column");
        }
        if (!std::isfinite(std::get<double>(v))) {
          throw Error(ErrorCode::TypeError, where + "/values/" + col.name + ": non-finite number");
        }
      } else {
        if (!std::holds_alternative<std::string>(v)) {
          throw Error(ErrorCode::TypeError, where + "/values/" + col.name + ": number in categorical column");
        }
        const auto* var = study.variable(col.name);
        const auto& label = std::get<std::string>(v);
        if (std::find(var->categories.begin(), var->categories.end(), label) == var->categories.end()) {
          throw Error(ErrorCode::TypeError, where + "/values/" + col.name + ": '" + label + "' is not a declared category");
        }
      }
    }
  }
}

namespace {

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw Error(ErrorCode::SchemaError, path + ": expected object");
  auto it = obj.find(key);
  if (it == obj.end()) throw Error(ErrorCode::SchemaError, path + "/" + key + ": missing field");
  return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_string()) throw Error(ErrorCode::SchemaError, path + "/" + key + ": expected string");
  return v.get<std::string>();
}

double require_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw Error(ErrorCode::SchemaError, path + ": expected number");
  return v.get<double>();
}

const json& require_array(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_array()) throw Error(ErrorCode::SchemaError, path + "/" + key + ": expected array");
  return v;
}

Relation parse_relation(const std::string& s, const std::string& path) {
  if (s == "<=" || s == "≤") return Relation::LessEqual;
  if (s == ">=" || s == "≥") return Relation::GreaterEqual;
  throw Error(ErrorCode::SchemaError, path + ": relation must be '<=' or '>='");
}

ConstraintDef parse_constraint(const json& c, const std::string& p) {
  ConstraintDef def;
  def.name = require_string(c, "name", p);
  def.target = require_string(c, "target", p);
  def.relation = parse_relation(require_string(c, "relation", p), p + "/relation");
  def.bound = require_number(require(c, "bound", p), p + "/bound");
  return def;
}

json constraint_json(const ConstraintDef& c) {
  return json{{"name", c.name}, {"target", c.target}, {"relation", std::string(to_string(c.relation))}, {"bound", c.bound}};
}

}  // namespace

Study load_study(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, std::string("/: not valid JSON (") + e.what() + ")");
  }
  if (!doc.is_object()) throw Error(ErrorCode::SchemaError, "/: expected object");

  Study s;
  s.id = require_string(doc, "id", "");
  s.title = require_string(doc, "title", "");

  const json& vars = require_array(doc, "variables", "");
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const std::string p = "/variables/" + std::to_string(i);
    const json& v = vars[i];
    VariableDef def;
    def.name = require_string(v, "name", p);
    const std::string kind = require_string(v, "kind", p);
    if (kind == "continuous") {
      def.kind = VariableKind::Continuous;
      if (auto it = v.find("bounds"); it != v.end() && !it->is_null()) {
        if (!it->is_array() || it->size() != 2) throw Error(ErrorCode::SchemaError, p + "/bounds: expected [lo, hi]");
        def.bounds = std::make_pair(require_number((*it)[0], p + "/bounds/0"), require_number((*it)[1], p + "/bounds/1"));
      }
    } else if (kind == "categorical") {
      def.kind = VariableKind::Categorical;
      const json& cats = require_array(v, "categories", p);
      for (std::size_t k = 0; k < cats.size(); ++k) {
        if (!cats[k].is_string()) throw Error(ErrorCode::SchemaError, p + "/categories/" + std::to_string(k) + ": expected string");
        def.categories.push_back(cats[k].get<std::string>());
      }
    } else {
      throw Error(ErrorCode::SchemaError, p + "/kind: expected 'continuous' or 'categorical'");
    }
    s.variables.push_back(std::move(def));
  }

  const json& objs = require_array(doc, "objectives", "");
  for (std::size_t i = 0; i < objs.size(); ++i) {
    const std::string p = "/objectives/" + std::to_string(i);
    ObjectiveDef def;
    def.name = require_string(objs[i], "name", p);
    const std::string dir = require_string(objs[i], "direction", p);
    if (dir == "minimize") def.direction = Direction::Minimize;
    else if (dir == "maximize") def.direction = Direction::Maximize;
    else throw Error(ErrorCode::SchemaError, p + "/direction: expected 'minimize' or 'maximize'");
    s.objectives.push_back(std::move(def));
  }

  const json& resp = require_array(doc, "responses", "");
  for (std::size_t i = 0; i < resp.size(); ++i) {
    if (!resp[i].is_string()) throw Error(ErrorCode::SchemaError, "/responses/" + std::to_string(i) + ": expected string");
    s.responses.push_back(resp[i].get<std::string>());
  }

  const json& cons = require_array(doc, "constraints", "");
  for (std::size_t i = 0; i < cons.size(); ++i) {
    s.constraints.push_back(parse_constraint(cons[i], "/constraints/" + std::to_string(i)));
  }

  const json& designs = require_array(doc, "designs", "");
  for (std::size_t i = 0; i < designs.size(); ++i) {
    const std::string p = "/designs/" + std::to_string(i);
    const json& d = designs[i];
    const json& id = require(d, "design_id", p);
    if (!id.is_number_unsigned()) {
      throw Error(ErrorCode::SchemaError, p + "/design_id: expected non-negative integer");
    }
    DesignRecord rec;
    rec.design_id = id.get<DesignId>();
    const json& values = require(d, "values", p);
    if (!values.is_object()) throw Error(ErrorCode::SchemaError, p + "/values: expected object");
    for (const auto& [key, v] : values.items()) {
      if (v.is_null()) rec.values.emplace(key, std::monostate{});
      else if (v.is_number()) rec.values.emplace(key, v.get<double>());
      else if (v.is_string()) rec.values.emplace(key, v.get<std::string>());
      else throw Error(ErrorCode::SchemaError, p + "/values/" + key + ": expected number, string or null");
    }
    s.designs.push_back(std::move(rec));
  }

  validate_study(s);
  return s;
}

Study load_study_file(const std::string& path) { return load_study(read_file(path)); }

std::string export_study(const Study& study) {
  json doc;
  doc["id"] = study.id;
  doc["title"] = study.title;
  json vars = json::array();
  for (const auto& v : study.variables) {
    json j{{"name", v.name}};
    if (v.kind == VariableKind::Continuous) {
      j["kind"] = "continuous";
      if (v.bounds) j["bounds"] = {v.bounds->first, v.bounds->second};
    } else {
      j["kind"] = "categorical";
      j["categories"] = v.categories;
    }
    vars.push_back(std::move(j));
  }
  doc["variables"] = std::move(vars);
  json objs = json::array();
  for (const auto& o : study.objectives) objs.push_back({{"name", o.name}, {"direction", std::string(to_string(o.direction))}});
  doc["objectives"] = std::move(objs);
  doc["responses"] = study.responses;
  json cons = json::array();
  for (const auto& c : study.constraints) cons.push_back(constraint_json(c));
  doc["constraints"] = std::move(cons);
  json designs = json::array();
  for (const auto& d : study.designs) {
    json values = json::object();
    for (const auto& [k, v] : d.values) {
      if (is_missing(v)) values[k] = nullptr;
      else if (std::holds_alternative<double>(v)) values[k] = std::get<double>(v);
      else values[k] = std::get<std::string>(v);
    }
    designs.push_back({{"design_id", d.design_id}, {"values", std::move(values)}});
  }
  doc["designs"] = std::move(designs);
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// CSV

namespace {

// RFC 4180 style: quoted fields may contain separators, quotes ("") and newlines.
std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      field_started = false;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      row.push_back(std::move(field));
      field.clear();
      field_started = false;
      if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
      row.clear();
      ++line;
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (quoted) throw Error(ErrorCode::ParseError, "unterminated quoted field near line " + std::to_string(line));
  if (field_started || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos && !s.empty()) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

std::optional<double> parse_double(const std::string& s) {
  const std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  double v = 0;
  const char* first = t.data();
  if (*first == '+') ++first;
  auto res = std::from_chars(first, t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

Study load_csv(std::string_view table, std::string_view manifest_json) {
  json manifest;
  try {
    manifest = json::parse(manifest_json);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, std::string("manifest: not valid JSON (") + e.what() + ")");
  }
  const json& roles = require(manifest, "roles", "manifest");
  if (!roles.is_object()) throw Error(ErrorCode::SchemaError, "manifest/roles: expected object");

  const auto rows = parse_csv(table);
  if (rows.empty()) throw Error(ErrorCode::SchemaError, "csv: header row missing");
  const auto& header = rows[0];

  Study s;
  s.id = manifest.value("id", std::string("csv_study"));
  s.title = manifest.value("title", s.id);
  const json categories = manifest.value("categories", json::object());
  const json bounds = manifest.value("bounds", json::object());

  enum class Role { DesignId, Variable, ObjMin, ObjMax, Response };
  std::vector<Role> col_roles;
  std::optional<std::size_t> id_col;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name = trim(header[c]);
    auto it = roles.find(name);
    if (it == roles.end() || !it->is_string()) {
      throw Error(ErrorCode::SchemaError, "manifest/roles/" + name + ": column has no role");
    }
    const std::string role = it->get<std::string>();
    if (role == "design_id") {
      if (id_col) throw Error(ErrorCode::IntegrityError, "manifest/roles: more than one design_id column");
      id_col = c;
      col_roles.push_back(Role::DesignId);
    } else if (role == "variable") {
      col_roles.push_back(Role::Variable);
      VariableDef v;
      v.name = name;
      if (auto cit = categories.find(name); cit != categories.end()) {
        v.kind = VariableKind::Categorical;
        v.categories = cit->get<std::vector<std::string>>();
      }
      s.variables.push_back(std::move(v));
    } else if (role == "objective:min" || role == "objective:max") {
      col_roles.push_back(role == "objective:min" ? Role::ObjMin : Role::ObjMax);
      s.objectives.push_back({name, role == "objective:min" ? Direction::Minimize : Direction::Maximize});
    } else if (role == "response") {
      col_roles.push_back(Role::Response);
      s.responses.push_back(name);
    } else {
      throw Error(ErrorCode::SchemaError, "manifest/roles/" + name + ": unknown role '" + role + "'");
    }
  }
  for (const auto& [name, _] : roles.items()) {
    if (std::find_if(header.begin(), header.end(), [&](const std::string& h) { return trim(h) == name; }) == header.end()) {
      throw Error(ErrorCode::SchemaError, "manifest/roles/" + name + ": column not present in CSV header");
    }
  }

  auto continuous = [&](const std::string& name) {
    const auto* v = s.variable(name);
    return v == nullptr || v->kind == VariableKind::Continuous;
  };

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size()) {
      throw Error(ErrorCode::ParseError, "row " + std::to_string(r) + ": expected " + std::to_string(header.size()) +
                                             " cells, got " + std::to_string(row.size()));
    }
    DesignRecord rec;
    if (id_col) {
      const std::string cell = trim(row[*id_col]);
      DesignId id = 0;
      auto res = std::from_chars(cell.data(), cell.data() + cell.size(), id);
      if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
        throw Error(ErrorCode::ParseError, "row " + std::to_string(r) + ", column '" + trim(header[*id_col]) +
                                               "': '" + cell + "' is not a design id");
      }
      rec.design_id = id;
    } else {
      rec.design_id = r - 1;
    }
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (col_roles[c] == Role::DesignId) continue;
      const std::string name = trim(header[c]);
      const std::string& cell = row[c];
      if (trim(cell).empty()) {
        rec.values.emplace(name, std::monostate{});
      } else if (continuous(name)) {
        auto v = parse_double(cell);
        if (!v) {
          throw Error(ErrorCode::ParseError, "row " + std::to_string(r) + ", column '" + name + "': '" + cell +
                                                 "' is not a number");
        }
        rec.values.emplace(name, *v);
      } else {
        rec.values.emplace(name, cell);
      }
    }
    s.designs.push_back(std::move(rec));
  }

  for (auto& v : s.variables) {
    if (v.kind != VariableKind::Continuous) continue;
    if (auto bit = bounds.find(v.name); bit != bounds.end()) {
      if (!bit->is_array() || bit->size() != 2) throw Error(ErrorCode::SchemaError, "manifest/bounds/" + v.name + ": expected [lo, hi]");
      v.bounds = std::make_pair(require_number((*bit)[0], "manifest/bounds/" + v.name + "/0"),
                                require_number((*bit)[1], "manifest/bounds/" + v.name + "/1"));
      continue;
    }
    std::optional<std::pair<double, double>> range;
    for (const auto& d : s.designs) {
      const auto& val = d.values.at(v.name);
      if (!std::holds_alternative<double>(val)) continue;
      const double x = std::get<double>(val);
      if (!range) range = std::make_pair(x, x);
      else range = std::make_pair(std::min(range->first, x), std::max(range->second, x));
    }
    v.bounds = range.value_or(std::make_pair(0.0, 0.0));
  }

  if (auto it = manifest.find("constraints"); it != manifest.end()) {
    if (!it->is_array()) throw Error(ErrorCode::SchemaError, "manifest/constraints: expected array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      s.constraints.push_back(parse_constraint((*it)[i], "manifest/constraints/" + std::to_string(i)));
    }
  }

  validate_study(s);
  return s;
}

CsvExport export_csv(const Study& study) {
  CsvExport out;
  const auto cols = study.columns();
  json roles = json::object();
  roles["design_id"] = "design_id";
  std::string header = "design_id";
  for (const auto& c : cols) {
    header += "," + csv_escape(c.name);
    if (c.role == ColumnRole::Variable) roles[c.name] = "variable";
    else if (c.role == ColumnRole::Response) roles[c.name] = "response";
    else roles[c.name] = study.objective(c.name)->direction == Direction::Minimize ? "objective:min" : "objective:max";
  }
  out.table = header + "\n";
  for (const auto& d : study.designs) {
    std::string line = std::to_string(d.design_id);
    for (const auto& c : cols) {
      line += ",";
      const Value& v = d.values.at(c.name);
      if (std::holds_alternative<double>(v)) line += format_shortest(std::get<double>(v));
      else if (std::holds_alternative<std::string>(v)) line += csv_escape(std::get<std::string>(v));
    }
    out.table += line + "\n";
  }

  json manifest;
  manifest["id"] = study.id;
  manifest["title"] = study.title;
  manifest["roles"] = std::move(roles);
  json categories = json::object();
  json bounds = json::object();
  for (const auto& v : study.variables) {
    if (v.kind == VariableKind::Categorical) categories[v.name] = v.categories;
    else if (v.bounds) bounds[v.name] = {v.bounds->first, v.bounds->second};
  }
  manifest["categories"] = std::move(categories);
  manifest["bounds"] = std::move(bounds);
  json cons = json::array();
  for (const auto& c : study.constraints) cons.push_back(constraint_json(c));
  manifest["constraints"] = std::move(cons);
  out.manifest = manifest.dump(2) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Queries

ColumnSeries column_series(const Study& study, std::string_view column) {
  if (!study.column(column)) throw Error(ErrorCode::UnknownColumn, "unknown column '" + std::string(column) + "'");
  ColumnSeries out;
  const std::string key(column);
  for (const auto& d : study.designs) {
    const Value& v = d.values.at(key);
    if (is_missing(v)) out.missing_ids.push_back(d.design_id);
    else out.points.push_back({d.design_id, v});
  }
  return out;
}

NumericSeries numeric_series(const Study& study, std::string_view column) {
  auto info = study.column(column);
  if (!info) throw Error(ErrorCode::UnknownColumn, "unknown column '" + std::string(column) + "'");
  if (!info->numeric) throw Error(ErrorCode::TypeError, "column '" + std::string(column) + "' is categorical");
  auto series = column_series(study, column);
  NumericSeries out;
  out.missing_ids = std::move(series.missing_ids);
  out.ids.reserve(series.points.size());
  out.values.reserve(series.points.size());
  for (const auto& p : series.points) {
    out.ids.push_back(p.design_id);
    out.values.push_back(std::get<double>(p.value));
  }
  return out;
}

namespace {

bool record_feasible(const Study& study, const DesignRecord& d) {
  for (const auto& c : study.constraints) {
    const Value& v = d.values.at(c.target);
    if (!std::holds_alternative<double>(v)) return false;
    const double x = std::get<double>(v);
    const bool ok = c.relation == Relation::LessEqual ? x <= c.bound : x >= c.bound;
    if (!ok) return false;
  }
  return true;
}

}  // namespace

bool is_feasible(const Study& study, DesignId design_id) {
  const auto* d = study.design(design_id);
  if (!d) throw Error(ErrorCode::UnknownDesign, "no design with id " + std::to_string(design_id));
  return record_feasible(study, *d);
}

std::vector<bool> feasibility_mask(const Study& study) {
  std::vector<bool> mask;
  mask.reserve(study.designs.size());
  for (const auto& d : study.designs) mask.push_back(record_feasible(study, d));
  return mask;
}

}  // namespace vizagent
