#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "evoarch/identifier.hpp"
#include "evoarch/value.hpp"

namespace evoarch {

// Built-in vocabulary.
inline constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view kRdfsDomain = "http://www.w3.org/2000/01/rdf-schema#domain";
inline constexpr std::string_view kRdfsRange = "http://www.w3.org/2000/01/rdf-schema#range";
inline constexpr std::string_view kRdfsResource = "http://www.w3.org/2000/01/rdf-schema#Resource";

struct Literal {
  std::string lexical;
  Datatype datatype = Datatype::kString;

  // Canonicalizes `lexical` under `dt`; throws kValueSyntaxError.
  static Literal make(std::string_view lexical, Datatype dt);

  friend bool operator==(const Literal&, const Literal&) = default;
  friend auto operator<=>(const Literal&, const Literal&) = default;
};

// Object position of a fact: a literal value or a reference to an entity.
using ObjectValue = std::variant<Literal, Identifier>;

inline bool is_ref(const ObjectValue& o) { return std::holds_alternative<Identifier>(o); }

struct RecordAttribute {
  Identifier predicate;
  ObjectValue object;

  friend bool operator==(const RecordAttribute&, const RecordAttribute&) = default;
  friend auto operator<=>(const RecordAttribute&, const RecordAttribute&) = default;
};

// A single (subject, predicate, object) assertion.
struct Fact {
  Identifier subject;
  RecordAttribute attribute;

  friend bool operator==(const Fact&, const Fact&) = default;
  friend auto operator<=>(const Fact&, const Fact&) = default;
};

using FactSet = std::set<Fact>;

struct Record {
  Identifier record_id;
  Identifier subject;
  std::set<RecordAttribute> attributes;

  friend bool operator==(const Record&, const Record&) = default;
  friend auto operator<=>(const Record&, const Record&) = default;
};

// Immutable set of records keyed by subject, with a content hash over the
// canonical facts serialization (see facts_format.hpp).
class RecordSet {
 public:
  RecordSet();
  // Throws kValidationError on a duplicate subject or an empty record.
  explicit RecordSet(std::vector<Record> records);

  // Groups facts by subject. Record ids are derived via record_identifier().
  static RecordSet from_facts(const FactSet& facts, std::string_view dataset_slug);

  const std::map<Identifier, Record>& records() const { return records_; }
  const std::string& content_hash() const { return hash_; }
  std::size_t size() const { return records_.size(); }
  std::size_t attribute_count() const;
  const Record* find(const Identifier& subject) const;
  FactSet facts() const;

  // Fact-set equality.
  friend bool operator==(const RecordSet& a, const RecordSet& b) { return a.hash_ == b.hash_; }

 private:
  std::map<Identifier, Record> records_;
  std::string hash_;
};

enum class SchemaKind { kClass, kProperty };
enum class SourceConstruct {
  kTable, kColumn, kDimension, kMeasure, kAttribute, kRdfClass, kRdfProperty
};

std::string_view schema_kind_name(SchemaKind k);
std::string_view source_construct_name(SourceConstruct c);
SchemaKind parse_schema_kind(std::string_view s);
SourceConstruct parse_source_construct(std::string_view s);

// A range is either a class or a datatype.
using Range = std::variant<Identifier, Datatype>;

struct SchemaObject {
  Identifier id;
  SchemaKind kind = SchemaKind::kClass;
  SourceConstruct construct = SourceConstruct::kTable;
  std::optional<Identifier> domain_class;
  std::optional<Range> range;

  static SchemaObject make_class(Identifier id, SourceConstruct construct);
  static SchemaObject make_property(Identifier id, SourceConstruct construct,
                                    std::optional<Identifier> domain, Range range);

  // Throws kValidationError when kind and domain/range disagree.
  void validate() const;

  friend bool operator==(const SchemaObject&, const SchemaObject&) = default;
  friend auto operator<=>(const SchemaObject&, const SchemaObject&) = default;
};

// Immutable set of schema objects keyed by id. The id of the version itself
// is derived from the content hash of its serialization.
class SchemaVersion {
 public:
  SchemaVersion();
  // Throws kValidationError on duplicate ids or invalid objects.
  explicit SchemaVersion(std::vector<SchemaObject> objects);

  const Identifier& id() const { return id_; }
  const std::map<Identifier, SchemaObject>& objects() const { return objects_; }
  const std::string& content_hash() const { return hash_; }
  std::size_t size() const { return objects_.size(); }
  const SchemaObject* find(const Identifier& id) const;
  std::size_t count(SchemaKind kind) const;

  friend bool operator==(const SchemaVersion& a, const SchemaVersion& b) {
    return a.hash_ == b.hash_;
  }

 private:
  void finish();

  std::map<Identifier, SchemaObject> objects_;
  std::string hash_;
  Identifier id_;
};

struct TimeInterval {
  Timestamp start;
  std::optional<Timestamp> end;  // absent: still open

  bool contains(Timestamp t) const { return start <= t && (!end || t < *end); }
  friend bool operator==(const TimeInterval&, const TimeInterval&) = default;
};

struct TemporalAnnotation {
  TimeInterval transaction_time;
  std::optional<TimeInterval> valid_time;

  void validate() const;
  friend bool operator==(const TemporalAnnotation&, const TemporalAnnotation&) = default;
};

struct ProvenanceInfo {
  std::string agent;
  std::string process;
  std::string source;
  Timestamp recorded_at;
  std::optional<std::string> annotation;

  void validate() const;
  friend bool operator==(const ProvenanceInfo&, const ProvenanceInfo&) = default;
};

enum class SourceModel { kRelational, kMultidimensional, kRdf };
std::string_view source_model_name(SourceModel m);
SourceModel parse_source_model(std::string_view s);

struct DiachronicDataset {
  Identifier diachronic_id;
  std::string slug;
  std::string title;
  SourceModel source_model = SourceModel::kRdf;
  std::vector<Identifier> version_ids;
};

struct DatasetInstantiation {
  Identifier version_id;
  std::string label;  // v0001
  Identifier diachronic_id;
  TemporalAnnotation temporal;
  ProvenanceInfo provenance;
  Identifier schema_version_id;
  std::string schema_hash;
  std::string record_set_hash;
  // Ingestion config JSON for tabular sources, empty for RDF. Needed to
  // reproduce the original serialization.
  std::string mapping_config;
};

}  // namespace evoarch
