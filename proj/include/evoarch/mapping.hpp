#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evoarch/csv.hpp"
#include "evoarch/model.hpp"
#include "evoarch/ntriples.hpp"

namespace evoarch {

struct ColumnSpec {
  std::string name;
  Datatype datatype = Datatype::kString;
  friend bool operator==(const ColumnSpec&, const ColumnSpec&) = default;
};

struct RelationalConfig {
  std::string table_name;
  std::vector<ColumnSpec> columns;
  std::vector<std::string> primary_key;

  void validate() const;
  std::vector<std::string> column_names() const;
  friend bool operator==(const RelationalConfig&, const RelationalConfig&) = default;
};

enum class CubeRole { kDimension, kMeasure, kAttribute };
std::string_view cube_role_name(CubeRole r);

struct CubeColumn {
  std::string name;
  CubeRole role = CubeRole::kDimension;
  Datatype datatype = Datatype::kString;
  friend bool operator==(const CubeColumn&, const CubeColumn&) = default;
};

struct CubeConfig {
  std::vector<CubeColumn> columns;

  void validate() const;
  std::vector<std::string> column_names() const;
  friend bool operator==(const CubeConfig&, const CubeConfig&) = default;
};

// JSON config documents use the struct field names exactly. Unknown or
// missing fields are kConfigMismatch.
RelationalConfig parse_relational_config(std::string_view json_text);
CubeConfig parse_cube_config(std::string_view json_text);
std::string to_json(const RelationalConfig& cfg);
std::string to_json(const CubeConfig& cfg);

struct MappedVersion {
  SchemaVersion schema;
  RecordSet records;
};

// Tables become classes and columns properties (domain = table class,
// range = column datatype). Each row becomes one record whose subject is
// minted from the primary-key values; every non-null field (empty cell) is
// one attribute, plus an rdf:type attribute pointing at the table class.
// Errors: kDuplicateKey, kValueSyntaxError, kValidationError (bad config).
MappedVersion map_relational(std::span<const CsvRow> rows, const RelationalConfig& cfg,
                             std::string_view dataset_slug);

// Cube columns become properties of one observation class; each row is an
// observation record keyed by its dimension values in column order.
MappedVersion map_multidimensional(std::span<const CsvRow> rows, const CubeConfig& cfg,
                                   std::string_view dataset_slug);

// Triples grouped by subject, one record per subject. Predicates become
// properties, rdf:type objects become classes, rdfs:domain/rdfs:range
// triples fill in domain and range (default range rdfs:Resource).
MappedVersion map_rdf(std::span<const Triple> triples, std::string_view dataset_slug);

// Canonical serializations used for export. Relational rows are sorted by
// primary key, cube rows by dimension tuple, N-Triples lines bytewise.
std::string export_relational_csv(const RecordSet& rs, const RelationalConfig& cfg,
                                  std::string_view dataset_slug);
std::string export_cube_csv(const RecordSet& rs, const CubeConfig& cfg,
                            std::string_view dataset_slug);
std::string export_ntriples(const RecordSet& rs, std::string_view dataset_slug);

// Ids of the schema objects produced for relational / cube columns.
Identifier table_class_id(std::string_view dataset_slug, std::string_view table);
Identifier column_property_id(std::string_view dataset_slug, std::string_view table,
                              std::string_view column);
inline constexpr std::string_view kObservationTable = "observation";

}  // namespace evoarch
