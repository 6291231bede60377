#include "evoarch/model.hpp"

#include "evoarch/error.hpp"
#include "evoarch/facts_format.hpp"
#include "evoarch/hash.hpp"

namespace evoarch {

Literal Literal::make(std::string_view lexical, Datatype dt) {
  return Literal{canonicalize_value(lexical, dt), dt};
}

RecordSet::RecordSet() : hash_(sha256_hex("")) {}

RecordSet::RecordSet(std::vector<Record> records) {
  for (auto& r : records) {
    if (r.attributes.empty()) {
      throw Error(ErrorCode::kValidationError, "record " + r.subject.value + " has no attributes");
    }
    Identifier subject = r.subject;
    if (!records_.emplace(subject, std::move(r)).second) {
      throw Error(ErrorCode::kValidationError, "two records share subject " + subject.value);
    }
  }
  hash_ = sha256_hex(serialize_facts(facts()));
}

RecordSet RecordSet::from_facts(const FactSet& facts, std::string_view dataset_slug) {
  std::vector<Record> records;
  for (const auto& f : facts) {
    if (records.empty() || records.back().subject != f.subject) {
      records.push_back(Record{record_identifier(dataset_slug, f.subject), f.subject, {}});
    }
    records.back().attributes.insert(f.attribute);
  }
  return RecordSet(std::move(records));
}

std::size_t RecordSet::attribute_count() const {
  std::size_t n = 0;
  for (const auto& [_, r] : records_) n += r.attributes.size();
  return n;
}

const Record* RecordSet::find(const Identifier& subject) const {
  auto it = records_.find(subject);
  return it == records_.end() ? nullptr : &it->second;
}

FactSet RecordSet::facts() const {
  FactSet out;
  for (const auto& [subject, r] : records_) {
    for (const auto& a : r.attributes) out.insert(out.end(), Fact{subject, a});
  }
  return out;
}

std::string_view schema_kind_name(SchemaKind k) {
  return k == SchemaKind::kClass ? "class" : "property";
}

SchemaKind parse_schema_kind(std::string_view s) {
  if (s == "class") return SchemaKind::kClass;
  if (s == "property") return SchemaKind::kProperty;
  throw Error(ErrorCode::kParseError, "unknown schema kind '" + std::string(s) + "'");
}

std::string_view source_construct_name(SourceConstruct c) {
  switch (c) {
    case SourceConstruct::kTable: return "table";
    case SourceConstruct::kColumn: return "column";
    case SourceConstruct::kDimension: return "dimension";
    case SourceConstruct::kMeasure: return "measure";
    case SourceConstruct::kAttribute: return "attribute";
    case SourceConstruct::kRdfClass: return "rdf-class";
    case SourceConstruct::kRdfProperty: return "rdf-property";
  }
  return "table";
}

SourceConstruct parse_source_construct(std::string_view s) {
  for (auto c : {SourceConstruct::kTable, SourceConstruct::kColumn, SourceConstruct::kDimension,
                 SourceConstruct::kMeasure, SourceConstruct::kAttribute, SourceConstruct::kRdfClass,
                 SourceConstruct::kRdfProperty}) {
    if (source_construct_name(c) == s) return c;
  }
  throw Error(ErrorCode::kParseError, "unknown source construct '" + std::string(s) + "'");
}

SchemaObject SchemaObject::make_class(Identifier id, SourceConstruct construct) {
  return SchemaObject{std::move(id), SchemaKind::kClass, construct, std::nullopt, std::nullopt};
}

SchemaObject SchemaObject::make_property(Identifier id, SourceConstruct construct,
                                         std::optional<Identifier> domain, Range range) {
  return SchemaObject{std::move(id), SchemaKind::kProperty, construct, std::move(domain),
                      std::move(range)};
}

void SchemaObject::validate() const {
  if (id.value.empty()) throw Error(ErrorCode::kValidationError, "schema object without id");
  if (kind == SchemaKind::kClass && (domain_class || range)) {
    throw Error(ErrorCode::kValidationError, "class " + id.value + " carries a domain or range");
  }
  if (kind == SchemaKind::kProperty && !range) {
    throw Error(ErrorCode::kValidationError, "property " + id.value + " has no range");
  }
}

SchemaVersion::SchemaVersion() { finish(); }

SchemaVersion::SchemaVersion(std::vector<SchemaObject> objects) {
  for (auto& o : objects) {
    o.validate();
    Identifier id = o.id;
    if (!objects_.emplace(id, std::move(o)).second) {
      throw Error(ErrorCode::kValidationError, "duplicate schema object " + id.value);
    }
  }
  finish();
}

void SchemaVersion::finish() {
  hash_ = sha256_hex(serialize_schema(*this));
  id_ = Identifier::opaque("schema:" + hash_);
}

const SchemaObject* SchemaVersion::find(const Identifier& id) const {
  auto it = objects_.find(id);
  return it == objects_.end() ? nullptr : &it->second;
}

std::size_t SchemaVersion::count(SchemaKind kind) const {
  std::size_t n = 0;
  for (const auto& [_, o] : objects_) n += o.kind == kind;
  return n;
}

void TemporalAnnotation::validate() const {
  if (transaction_time.end && *transaction_time.end < transaction_time.start) {
    throw Error(ErrorCode::kValidationError, "transaction time ends before it starts");
  }
  if (valid_time && valid_time->end && *valid_time->end < valid_time->start) {
    throw Error(ErrorCode::kValidationError, "valid time ends before it starts");
  }
}

void ProvenanceInfo::validate() const {
  if (agent.empty()) throw Error(ErrorCode::kValidationError, "provenance agent is empty");
  if (source.empty()) throw Error(ErrorCode::kValidationError, "provenance source is empty");
}

std::string_view source_model_name(SourceModel m) {
  switch (m) {
    case SourceModel::kRelational: return "relational";
    case SourceModel::kMultidimensional: return "multidimensional";
    case SourceModel::kRdf: return "rdf";
  }
  return "rdf";
}

SourceModel parse_source_model(std::string_view s) {
  if (s == "relational") return SourceModel::kRelational;
  if (s == "multidimensional") return SourceModel::kMultidimensional;
  if (s == "rdf") return SourceModel::kRdf;
  throw Error(ErrorCode::kValidationError, "unknown source model '" + std::string(s) + "'");
}

}  // namespace evoarch
