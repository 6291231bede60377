#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "evoarch/archive.hpp"
#include "evoarch/delta.hpp"
#include "evoarch/resource.hpp"

namespace evoarch {

class VersionSelector {
 public:
  struct Latest {};
  static VersionSelector version(std::string version_ref) { return VersionSelector(std::move(version_ref)); }
  static VersionSelector at(Timestamp t) { return VersionSelector(t); }
  static VersionSelector latest() { return VersionSelector(Latest{}); }

  DatasetInstantiation resolve(const Archive& archive, std::string_view dataset) const;

 private:
  explicit VersionSelector(std::variant<std::string, Timestamp, Latest> v) : v_(std::move(v)) {}
  std::variant<std::string, Timestamp, Latest> v_;
};

struct SubjectPart {
  std::vector<Identifier> subjects;
};
struct PredicatePart {
  std::vector<Identifier> predicates;
};
struct ResourcePart {
  std::string name;
};
using PartSelector = std::variant<SubjectPart, PredicatePart, ResourcePart>;

// "subjects:<id>,<id>" | "predicates:<id>,..." | "resource:<name>"
PartSelector parse_part_selector(std::string_view text);

// Facts of one resolved version, optionally restricted to a part.
// Errors: kDatasetNotFound, kVersionNotFound, kNoVersionAtTime,
// kResourceNotFound, kDatasetMismatch (resource of another dataset).
FactSet snapshot_query(const Archive& archive, std::string_view dataset, const VersionSelector& selector,
                       const std::optional<PartSelector>& part = std::nullopt);

struct TimelineEntry {
  Identifier version_id;
  std::string label;
  Timestamp transaction_start;
  FactSet facts;
};
using Timeline = std::vector<TimelineEntry>;

// One entry per version overlapping [from, to] (every version when both are
// absent), in sequence order. Entries whose part is empty are kept.
Timeline longitudinal_query(const Archive& archive, std::string_view dataset,
                            const std::optional<PartSelector>& part = std::nullopt,
                            std::optional<Timestamp> from = std::nullopt, std::optional<Timestamp> to = std::nullopt);

// Names are low-level op names (add-attribute, ...) and/or high-level rule
// names. Kept: high-level changes whose name is listed, low-level changes
// whose op is listed, and the constituents of kept high-level changes.
ChangeSet filter_change_types(const ChangeSet& cs, const std::set<std::string>& type_filter);

// Adjacent versions return the cached change set; otherwise the two
// endpoint versions are diffed directly and the built-in rules applied.
// Part restriction, then the type filter, are applied afterwards.
// Errors: kVersionNotFound, kVersionOrderError unless v_from precedes v_to.
ChangeSet changes_query(const Archive& archive, std::string_view dataset, std::string_view v_from,
                        std::string_view v_to, const std::optional<std::set<std::string>>& type_filter = std::nullopt,
                        const std::optional<PartSelector>& part = std::nullopt);

struct MixedQueryHit {
  Identifier dataset_id;
  std::vector<Identifier> affected;          // subjects and schema object ids, sorted
  std::vector<std::string> changeset_files;  // relative to the archive root
};

// Scans every cached change set whose target version's transaction start lies
// in [from, to] and reports the datasets with changes of the listed types.
std::vector<MixedQueryHit> mixed_query(const Archive& archive, const std::set<std::string>& type_filter,
                                       std::optional<Timestamp> from = std::nullopt,
                                       std::optional<Timestamp> to = std::nullopt);

}  // namespace evoarch
