#pragma once

#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "evoarch/model.hpp"

namespace evoarch {

// Alphabetical, which is also the order changes are listed in.
enum class ChangeOp {
  kAddAttribute,
  kAddRecord,
  kAddSchemaObject,
  kDeleteAttribute,
  kDeleteRecord,
  kDeleteSchemaObject,
};

std::string_view change_op_name(ChangeOp op);
std::optional<ChangeOp> try_parse_change_op(std::string_view name);
bool is_addition(ChangeOp op);
ChangeOp inverse_op(ChangeOp op);

using ChangePayload = std::variant<RecordAttribute, Record, SchemaObject>;

// Record ops carry the full record; schema ops the full schema object and
// use the object id as subject.
struct LowLevelChange {
  ChangeOp op = ChangeOp::kAddAttribute;
  Identifier subject;
  ChangePayload payload;

  friend bool operator==(const LowLevelChange&, const LowLevelChange&) = default;
  friend auto operator<=>(const LowLevelChange&, const LowLevelChange&) = default;
};

struct HighLevelChange {
  std::string name;
  std::vector<LowLevelChange> constituents;
  std::vector<Identifier> context;
  std::optional<std::string> annotation;

  friend bool operator==(const HighLevelChange&, const HighLevelChange&) = default;
};

struct ChangeSet {
  Identifier dataset_id;
  Identifier from_version;
  Identifier to_version;
  std::vector<LowLevelChange> low_level;  // sorted, unique
  std::vector<HighLevelChange> high_level;

  bool empty() const { return low_level.empty() && high_level.empty(); }
  void normalize();

  friend bool operator==(const ChangeSet&, const ChangeSet&) = default;
};

// A version as seen by the differ.
struct VersionView {
  Identifier dataset_id;
  Identifier version_id;
  const SchemaVersion& schema;
  const RecordSet& records;
};

// Fact and schema-object set difference. Subjects present on only one side
// produce one add-record / delete-record; shared subjects produce
// attribute-level ops. Throws kDatasetMismatch across datasets.
ChangeSet compute_delta(const VersionView& from, const VersionView& to);

struct AppliedVersion {
  SchemaVersion schema;
  RecordSet records;
};

// (base - deletes) + adds. Deletes are applied before adds. Throws
// kInapplicableDelta naming the first offending change.
AppliedVersion apply_delta(const SchemaVersion& schema, const RecordSet& records, const ChangeSet& cs);

// Swaps adds with deletes and the version endpoints.
ChangeSet invert_delta(const ChangeSet& cs);

// Fact-level view of a change set: every fact added or deleted, with record
// ops expanded into their attributes. Schema ops are not facts.
struct SignedFact {
  bool added;
  Fact fact;
  friend auto operator<=>(const SignedFact&, const SignedFact&) = default;
};
std::set<SignedFact> fact_changes(const ChangeSet& cs);

// Keeps attribute changes whose fact passes `keep_fact`, trims record
// payloads to passing attributes (dropping records left empty) and keeps
// schema changes passing `keep_schema`. High-level changes survive only if
// all their constituents survive unchanged.
ChangeSet restrict_changes(const ChangeSet& cs, const std::function<bool(const Fact&)>& keep_fact,
                           const std::function<bool(const SchemaObject&)>& keep_schema);

}  // namespace evoarch
