#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evoarch/archive.hpp"
#include "evoarch/delta.hpp"
#include "evoarch/model.hpp"

namespace evoarch {

struct ResourceIdentification {
  enum class Mode { kExplicitSubjects, kPredicateValueCondition };
  Mode mode = Mode::kExplicitSubjects;
  std::vector<Identifier> subjects;        // explicit mode
  std::optional<Identifier> predicate;     // condition mode
  std::optional<ObjectValue> value;        // condition mode
};

struct ResourceDescription {
  // Absent: all predicates.
  std::optional<std::vector<Identifier>> predicate_whitelist;
  int expansion_depth = 0;  // 0..3
};

inline constexpr int kMaxExpansionDepth = 3;

struct DiachronicResource {
  Identifier resource_id;
  std::string name;
  Identifier dataset_id;
  ResourceIdentification identification;
  ResourceDescription description;

  // Throws kValidationError.
  void validate() const;
};

struct ResourceContext {
  Identifier resource_id;
  Identifier context_id;  // evoarch:res/<name>/v/<label>
  Identifier version_id;
  std::vector<Identifier> matched_subjects;
  FactSet facts;
};

// Builds and validates a resource bound to `dataset_id`.
DiachronicResource make_resource(std::string_view name, const Identifier& dataset_id,
                                 ResourceIdentification identification, ResourceDescription description);

// Definition file (.def) JSON:
//   {"name": ..., "dataset": <dataset id>,
//    "identification": {"mode": "explicit-subjects", "subjects": [...]}
//                    | {"mode": "predicate-value-condition",
//                       "condition": {"predicate": ..., "ref": ...}
//                                  | {"predicate": ..., "literal": ..., "datatype": ...}},
//    "description": {"predicates": "all" | [...], "depth": n}}
std::string resource_to_json(const DiachronicResource& r);
// Throws kValidationError on malformed definitions.
DiachronicResource resource_from_json(std::string_view json_text);

// Persists the definition. Errors: kDatasetNotFound, kResourceExists,
// kValidationError.
DiachronicResource define_resource(Archive& archive, std::string_view dataset,
                                   ResourceIdentification identification, ResourceDescription description,
                                   std::string_view name);
DiachronicResource load_resource(const Archive& archive, std::string_view name);

// Pure evaluation over one version's records. Level-0 subjects are the
// explicit subjects present in the version, or every subject holding the
// condition's (predicate, value). Each expansion level adds the filtered
// attributes of subjects referenced from the previous level.
ResourceContext evaluate_resource(const DiachronicResource& r, const Identifier& version_id,
                                  std::string_view version_label, const RecordSet& records);

// Loads the version from the archive. Errors: kVersionNotFound, kDatasetMismatch.
ResourceContext evaluate_resource(const Archive& archive, const DiachronicResource& r, std::string_view version);

// compute_delta restricted to facts of either context; schema changes are
// dropped. Built-in high-level rules run on the restricted set and every
// high-level context gains the resource id.
ChangeSet resource_diff(const DiachronicResource& r, const VersionView& from, std::string_view from_label,
                        const VersionView& to, std::string_view to_label);
ChangeSet resource_diff(const Archive& archive, const DiachronicResource& r, std::string_view v_from,
                        std::string_view v_to);

}  // namespace evoarch
