#include "evoarch/mapping.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <json.hpp>

#include "evoarch/error.hpp"

namespace evoarch {

using nlohmann::json;

namespace {

const Identifier& type_predicate() {
  static const Identifier id = Identifier::uri(std::string(kRdfType));
  return id;
}

void check_unique_names(const std::vector<std::string>& names) {
  std::set<std::string> seen;
  for (const auto& n : names) {
    if (n.empty()) throw Error(ErrorCode::kValidationError, "empty column name");
    if (!seen.insert(n).second) throw Error(ErrorCode::kValidationError, "duplicate column " + n);
  }
}

[[noreturn]] void config_error(const std::string& msg) {
  throw Error(ErrorCode::kConfigMismatch, msg);
}

json parse_config_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    config_error(std::string("config is not valid JSON: ") + e.what());
  }
}

void expect_keys(const json& j, std::initializer_list<std::string_view> keys, std::string_view what) {
  if (!j.is_object()) config_error(std::string(what) + " must be a JSON object");
  for (const auto& [k, _] : j.items()) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
      config_error("unknown field '" + k + "' in " + std::string(what));
    }
  }
  for (auto k : keys) {
    if (!j.contains(std::string(k))) config_error("missing field '" + std::string(k) + "' in " + std::string(what));
  }
}

std::string get_string(const json& j, const char* key) {
  if (!j.at(key).is_string()) config_error(std::string("field '") + key + "' must be a string");
  return j.at(key).get<std::string>();
}

Datatype get_datatype(const json& j) {
  auto dt = try_parse_datatype(get_string(j, "datatype"));
  if (!dt) config_error("unknown datatype '" + get_string(j, "datatype") + "'");
  return *dt;
}

ObjectValue make_object(const std::string& cell, Datatype dt, std::size_t row, const std::string& column) {
  try {
    std::string canonical = canonicalize_value(cell, dt);
    if (dt == Datatype::kUriRef) return parse_identifier(canonical);
    return Literal{std::move(canonical), dt};
  } catch (const Error& e) {
    throw Error(ErrorCode::kValueSyntaxError,
                "row " + std::to_string(row + 1) + ", column " + column + ": " + e.what());
  }
}

std::string object_text(const ObjectValue& o) {
  if (const auto* lit = std::get_if<Literal>(&o)) return lit->lexical;
  return std::get<Identifier>(o).value;
}

// Row cells for `rs`, one per column in `columns`, keyed by property id.
std::vector<CsvRow> rows_from_records(const RecordSet& rs, const std::vector<Identifier>& props) {
  std::map<Identifier, std::size_t> index;
  for (std::size_t i = 0; i < props.size(); ++i) index.emplace(props[i], i);
  std::vector<CsvRow> rows;
  for (const auto& [subject, record] : rs.records()) {
    CsvRow row(props.size());
    for (const auto& a : record.attributes) {
      auto it = index.find(a.predicate);
      if (it == index.end()) {
        if (a.predicate == type_predicate()) continue;
        throw Error(ErrorCode::kValidationError,
                    "record " + subject.value + " has attribute " + a.predicate.value +
                        " not described by the mapping config");
      }
      row[it->second] = object_text(a.object);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string csv_document(const std::vector<std::string>& header, const std::vector<CsvRow>& rows) {
  std::string out = csv_row(header) + "\n";
  for (const auto& r : rows) out += csv_row(r) + "\n";
  return out;
}

void sort_rows(std::vector<CsvRow>& rows, const std::vector<std::size_t>& key_cols,
               const std::vector<Datatype>& key_types) {
  std::sort(rows.begin(), rows.end(), [&](const CsvRow& a, const CsvRow& b) {
    for (std::size_t k = 0; k < key_cols.size(); ++k) {
      int c = compare_canonical(a[key_cols[k]], b[key_cols[k]], key_types[k]);
      if (c != 0) return c < 0;
    }
    return false;
  });
}

}  // namespace

std::string_view cube_role_name(CubeRole r) {
  switch (r) {
    case CubeRole::kDimension: return "dimension";
    case CubeRole::kMeasure: return "measure";
    case CubeRole::kAttribute: return "attribute";
  }
  return "dimension";
}

std::vector<std::string> RelationalConfig::column_names() const {
  std::vector<std::string> out;
  for (const auto& c : columns) out.push_back(c.name);
  return out;
}

void RelationalConfig::validate() const {
  if (table_name.empty()) throw Error(ErrorCode::kValidationError, "empty table_name");
  if (columns.empty()) throw Error(ErrorCode::kValidationError, "no columns");
  auto names = column_names();
  check_unique_names(names);
  if (primary_key.empty()) throw Error(ErrorCode::kValidationError, "empty primary_key");
  std::set<std::string> pk_seen;
  for (const auto& k : primary_key) {
    if (std::find(names.begin(), names.end(), k) == names.end()) {
      throw Error(ErrorCode::kValidationError, "primary key column " + k + " is not a column");
    }
    if (!pk_seen.insert(k).second) throw Error(ErrorCode::kValidationError, "primary key repeats " + k);
  }
}

std::vector<std::string> CubeConfig::column_names() const {
  std::vector<std::string> out;
  for (const auto& c : columns) out.push_back(c.name);
  return out;
}

void CubeConfig::validate() const {
  check_unique_names(column_names());
  bool has_dim = false, has_measure = false;
  for (const auto& c : columns) {
    has_dim |= c.role == CubeRole::kDimension;
    has_measure |= c.role == CubeRole::kMeasure;
  }
  if (!has_dim || !has_measure) {
    throw Error(ErrorCode::kValidationError, "a cube needs at least one dimension and one measure");
  }
}

RelationalConfig parse_relational_config(std::string_view json_text) {
  json j = parse_config_json(json_text);
  expect_keys(j, {"table_name", "columns", "primary_key"}, "relational config");
  RelationalConfig cfg;
  cfg.table_name = get_string(j, "table_name");
  if (!j["columns"].is_array()) config_error("'columns' must be an array");
  for (const auto& c : j["columns"]) {
    expect_keys(c, {"name", "datatype"}, "column");
    cfg.columns.push_back({get_string(c, "name"), get_datatype(c)});
  }
  if (!j["primary_key"].is_array()) config_error("'primary_key' must be an array");
  for (const auto& k : j["primary_key"]) {
    if (!k.is_string()) config_error("primary_key entries must be strings");
    cfg.primary_key.push_back(k.get<std::string>());
  }
  cfg.validate();
  return cfg;
}

CubeConfig parse_cube_config(std::string_view json_text) {
  json j = parse_config_json(json_text);
  expect_keys(j, {"columns"}, "cube config");
  CubeConfig cfg;
  if (!j["columns"].is_array()) config_error("'columns' must be an array");
  for (const auto& c : j["columns"]) {
    expect_keys(c, {"name", "role", "datatype"}, "column");
    std::string role = get_string(c, "role");
    CubeRole r;
    if (role == "dimension") r = CubeRole::kDimension;
    else if (role == "measure") r = CubeRole::kMeasure;
    else if (role == "attribute") r = CubeRole::kAttribute;
    else config_error("unknown cube role '" + role + "'");
    cfg.columns.push_back({get_string(c, "name"), r, get_datatype(c)});
  }
  cfg.validate();
  return cfg;
}

std::string to_json(const RelationalConfig& cfg) {
  json j;
  j["table_name"] = cfg.table_name;
  j["columns"] = json::array();
  for (const auto& c : cfg.columns) {
    j["columns"].push_back({{"name", c.name}, {"datatype", std::string(datatype_name(c.datatype))}});
  }
  j["primary_key"] = cfg.primary_key;
  return j.dump();
}

std::string to_json(const CubeConfig& cfg) {
  json j;
  j["columns"] = json::array();
  for (const auto& c : cfg.columns) {
    j["columns"].push_back({{"name", c.name},
                            {"role", std::string(cube_role_name(c.role))},
                            {"datatype", std::string(datatype_name(c.datatype))}});
  }
  return j.dump();
}

Identifier table_class_id(std::string_view dataset_slug, std::string_view table) {
  return mint_identifier(MintKind::kSchemaObject, {std::string(dataset_slug), std::string(table)});
}

Identifier column_property_id(std::string_view dataset_slug, std::string_view table,
                              std::string_view column) {
  return mint_identifier(MintKind::kSchemaObject,
                         {std::string(dataset_slug), std::string(table), std::string(column)});
}

MappedVersion map_relational(std::span<const CsvRow> rows, const RelationalConfig& cfg,
                             std::string_view dataset_slug) {
  cfg.validate();
  const std::string slug(dataset_slug);
  const Identifier cls = table_class_id(slug, cfg.table_name);
  std::vector<SchemaObject> objects{SchemaObject::make_class(cls, SourceConstruct::kTable)};
  std::vector<Identifier> props;
  for (const auto& c : cfg.columns) {
    props.push_back(column_property_id(slug, cfg.table_name, c.name));
    objects.push_back(SchemaObject::make_property(props.back(), SourceConstruct::kColumn, cls, c.datatype));
  }

  std::vector<std::size_t> pk_cols;
  for (const auto& k : cfg.primary_key) {
    for (std::size_t i = 0; i < cfg.columns.size(); ++i)
      if (cfg.columns[i].name == k) pk_cols.push_back(i);
  }

  std::set<Identifier> keys;
  std::vector<Record> records;
  records.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const CsvRow& row = rows[r];
    if (row.size() != cfg.columns.size()) {
      throw Error(ErrorCode::kConfigMismatch, "row " + std::to_string(r + 1) + " has wrong width");
    }
    Record rec;
    std::vector<std::string> key_values;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (row[c].empty()) continue;
      ObjectValue obj = make_object(row[c], cfg.columns[c].datatype, r, cfg.columns[c].name);
      rec.attributes.insert(RecordAttribute{props[c], obj});
    }
    for (auto c : pk_cols) {
      if (row[c].empty()) {
        throw Error(ErrorCode::kValueSyntaxError,
                    "row " + std::to_string(r + 1) + ": null primary key column " + cfg.columns[c].name);
      }
      key_values.push_back(object_text(make_object(row[c], cfg.columns[c].datatype, r, cfg.columns[c].name)));
    }
    Identifier key = composite_key(cfg.primary_key, key_values);
    if (!keys.insert(key).second) {
      throw Error(ErrorCode::kDuplicateKey, "duplicate primary key (" + key.value + ")");
    }
    rec.subject = mint_identifier(MintKind::kRecord, {slug, "pk", key.value});
    rec.subject.functional_meta["columns"] = key.functional_meta["columns"];
    rec.record_id = rec.subject;
    rec.attributes.insert(RecordAttribute{type_predicate(), cls});
    records.push_back(std::move(rec));
  }
  return {SchemaVersion(std::move(objects)), RecordSet(std::move(records))};
}

MappedVersion map_multidimensional(std::span<const CsvRow> rows, const CubeConfig& cfg,
                                   std::string_view dataset_slug) {
  cfg.validate();
  const std::string slug(dataset_slug);
  const Identifier cls = table_class_id(slug, kObservationTable);
  std::vector<SchemaObject> objects{SchemaObject::make_class(cls, SourceConstruct::kTable)};
  std::vector<Identifier> props;
  std::vector<std::string> dim_names;
  for (const auto& c : cfg.columns) {
    props.push_back(column_property_id(slug, kObservationTable, c.name));
    SourceConstruct construct = c.role == CubeRole::kDimension ? SourceConstruct::kDimension
                                : c.role == CubeRole::kMeasure ? SourceConstruct::kMeasure
                                                               : SourceConstruct::kAttribute;
    objects.push_back(SchemaObject::make_property(props.back(), construct, cls, c.datatype));
    if (c.role == CubeRole::kDimension) dim_names.push_back(c.name);
  }

  std::set<Identifier> keys;
  std::vector<Record> records;
  records.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const CsvRow& row = rows[r];
    if (row.size() != cfg.columns.size()) {
      throw Error(ErrorCode::kConfigMismatch, "row " + std::to_string(r + 1) + " has wrong width");
    }
    Record rec;
    std::vector<std::string> dims;
    for (std::size_t c = 0; c < row.size(); ++c) {
      const auto& col = cfg.columns[c];
      if (row[c].empty()) {
        if (col.role == CubeRole::kDimension) {
          throw Error(ErrorCode::kValueSyntaxError,
                      "row " + std::to_string(r + 1) + ": null dimension " + col.name);
        }
        continue;
      }
      ObjectValue obj = make_object(row[c], col.datatype, r, col.name);
      if (col.role == CubeRole::kDimension) dims.push_back(object_text(obj));
      rec.attributes.insert(RecordAttribute{props[c], std::move(obj)});
    }
    Identifier key = composite_key(dim_names, dims);
    if (!keys.insert(key).second) {
      throw Error(ErrorCode::kDuplicateKey, "duplicate dimension tuple (" + key.value + ")");
    }
    rec.subject = mint_identifier(MintKind::kRecord, {slug, "obs", key.value});
    rec.subject.functional_meta["columns"] = key.functional_meta["columns"];
    rec.record_id = rec.subject;
    rec.attributes.insert(RecordAttribute{type_predicate(), cls});
    records.push_back(std::move(rec));
  }
  return {SchemaVersion(std::move(objects)), RecordSet(std::move(records))};
}

MappedVersion map_rdf(std::span<const Triple> triples, std::string_view dataset_slug) {
  const Identifier domain_pred = Identifier::uri(std::string(kRdfsDomain));
  const Identifier range_pred = Identifier::uri(std::string(kRdfsRange));

  std::map<Identifier, std::set<RecordAttribute>> grouped;
  std::set<Identifier> predicates;
  std::set<Identifier> classes;
  std::map<Identifier, Identifier> domains;
  std::map<Identifier, Range> ranges;
  for (const auto& t : triples) {
    grouped[t.subject].insert(RecordAttribute{t.predicate, t.object});
    predicates.insert(t.predicate);
    const auto* obj = std::get_if<Identifier>(&t.object);
    if (!obj) continue;
    if (t.predicate == type_predicate()) classes.insert(*obj);
    if (t.predicate == domain_pred) {
      auto [it, inserted] = domains.emplace(t.subject, *obj);
      if (!inserted && *obj < it->second) it->second = *obj;
    }
    if (t.predicate == range_pred) {
      Range range = *obj;
      if (obj->value.starts_with(kXsd)) {
        std::string_view local = std::string_view(obj->value).substr(kXsd.size());
        if (local == "string") range = Datatype::kString;
        else if (local == "integer") range = Datatype::kInteger;
        else if (local == "decimal") range = Datatype::kDecimal;
        else if (local == "boolean") range = Datatype::kBoolean;
        else if (local == "dateTime") range = Datatype::kDateTime;
        else if (local == "anyURI") range = Datatype::kUriRef;
      }
      auto [it, inserted] = ranges.emplace(t.subject, range);
      if (!inserted && range < it->second) it->second = range;
    }
  }

  std::vector<SchemaObject> objects;
  for (const auto& p : predicates) {
    std::optional<Identifier> domain;
    if (auto it = domains.find(p); it != domains.end()) domain = it->second;
    Range range = Identifier::uri(std::string(kRdfsResource));
    if (auto it = ranges.find(p); it != ranges.end()) range = it->second;
    objects.push_back(SchemaObject::make_property(p, SourceConstruct::kRdfProperty, domain, range));
  }
  for (const auto& c : classes) {
    if (predicates.contains(c)) continue;
    objects.push_back(SchemaObject::make_class(c, SourceConstruct::kRdfClass));
  }

  std::vector<Record> records;
  records.reserve(grouped.size());
  for (auto& [subject, attrs] : grouped) {
    records.push_back(Record{record_identifier(dataset_slug, subject), subject, std::move(attrs)});
  }
  return {SchemaVersion(std::move(objects)), RecordSet(std::move(records))};
}

std::string export_relational_csv(const RecordSet& rs, const RelationalConfig& cfg,
                                  std::string_view dataset_slug) {
  std::vector<Identifier> props;
  for (const auto& c : cfg.columns) props.push_back(column_property_id(dataset_slug, cfg.table_name, c.name));
  auto rows = rows_from_records(rs, props);
  std::vector<std::size_t> key_cols;
  std::vector<Datatype> key_types;
  for (const auto& k : cfg.primary_key) {
    for (std::size_t i = 0; i < cfg.columns.size(); ++i) {
      if (cfg.columns[i].name == k) {
        key_cols.push_back(i);
        key_types.push_back(cfg.columns[i].datatype);
      }
    }
  }
  sort_rows(rows, key_cols, key_types);
  return csv_document(cfg.column_names(), rows);
}

std::string export_cube_csv(const RecordSet& rs, const CubeConfig& cfg, std::string_view dataset_slug) {
  std::vector<Identifier> props;
  std::vector<std::size_t> key_cols;
  std::vector<Datatype> key_types;
  for (std::size_t i = 0; i < cfg.columns.size(); ++i) {
    props.push_back(column_property_id(dataset_slug, kObservationTable, cfg.columns[i].name));
    if (cfg.columns[i].role == CubeRole::kDimension) {
      key_cols.push_back(i);
      key_types.push_back(cfg.columns[i].datatype);
    }
  }
  auto rows = rows_from_records(rs, props);
  sort_rows(rows, key_cols, key_types);
  return csv_document(cfg.column_names(), rows);
}

std::string export_ntriples(const RecordSet& rs, std::string_view dataset_slug) {
  std::vector<Triple> triples;
  triples.reserve(rs.attribute_count());
  for (const auto& [subject, record] : rs.records()) {
    for (const auto& a : record.attributes) triples.push_back(Triple{subject, a.predicate, a.object});
  }
  return serialize_ntriples(triples, dataset_slug);
}

}  // namespace evoarch
