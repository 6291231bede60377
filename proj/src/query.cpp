#include "evoarch/query.hpp"

#include <algorithm>

#include "evoarch/changeset_format.hpp"
#include "evoarch/error.hpp"
#include "evoarch/facts_format.hpp"
#include "evoarch/rules.hpp"

namespace evoarch {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

DiachronicResource resource_for(const Archive& archive, const DiachronicDataset& ds, const ResourcePart& part) {
  DiachronicResource r = load_resource(archive, part.name);
  if (r.dataset_id != ds.diachronic_id) {
    throw Error(ErrorCode::kDatasetMismatch,
                "resource " + part.name + " is bound to " + r.dataset_id.value + ", not " + ds.diachronic_id.value);
  }
  return r;
}

bool contains(const std::vector<Identifier>& ids, const Identifier& id) {
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

FactSet select_part(const FactSet& facts, const PartSelector& part,
                    const std::optional<DiachronicResource>& resource, const DatasetInstantiation& inst,
                    const RecordSet& records) {
  return std::visit(
      Overloaded{
          [&](const SubjectPart& p) {
            FactSet out;
            for (const auto& f : facts)
              if (contains(p.subjects, f.subject)) out.insert(f);
            return out;
          },
          [&](const PredicatePart& p) {
            FactSet out;
            for (const auto& f : facts)
              if (contains(p.predicates, f.attribute.predicate)) out.insert(f);
            return out;
          },
          [&](const ResourcePart&) {
            return evaluate_resource(*resource, inst.version_id, inst.label, records).facts;
          },
      },
      part);
}

std::optional<DiachronicResource> maybe_resource(const Archive& archive, const DiachronicDataset& ds,
                                                 const std::optional<PartSelector>& part) {
  if (part && std::holds_alternative<ResourcePart>(*part)) {
    return resource_for(archive, ds, std::get<ResourcePart>(*part));
  }
  return std::nullopt;
}

std::size_t version_index(const std::vector<DatasetInstantiation>& versions, const DatasetInstantiation& v) {
  for (std::size_t i = 0; i < versions.size(); ++i)
    if (versions[i].version_id == v.version_id) return i;
  throw Error(ErrorCode::kVersionNotFound, "version " + v.version_id.value + " vanished");
}

}  // namespace

DatasetInstantiation VersionSelector::resolve(const Archive& archive, std::string_view dataset) const {
  return std::visit(Overloaded{
                        [&](const std::string& ref) { return archive.instantiation(dataset, ref); },
                        [&](Timestamp t) { return archive.resolve_version_at(dataset, t); },
                        [&](Latest) { return archive.latest_version(dataset); },
                    },
                    v_);
}

PartSelector parse_part_selector(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw Error(ErrorCode::kValidationError, "part selector must be subjects:..., predicates:... or resource:<name>");
  }
  std::string_view kind = text.substr(0, colon);
  std::string_view rest = text.substr(colon + 1);
  if (rest.empty()) throw Error(ErrorCode::kValidationError, "empty part selector");
  if (kind == "resource") return ResourcePart{std::string(rest)};
  std::vector<Identifier> ids;
  for (auto item : split(rest, ',')) {
    if (item.empty()) throw Error(ErrorCode::kValidationError, "empty identifier in part selector");
    ids.push_back(parse_identifier(item));
  }
  if (kind == "subjects") return SubjectPart{std::move(ids)};
  if (kind == "predicates") return PredicatePart{std::move(ids)};
  throw Error(ErrorCode::kValidationError, "unknown part selector kind '" + std::string(kind) + "'");
}

FactSet snapshot_query(const Archive& archive, std::string_view dataset, const VersionSelector& selector,
                       const std::optional<PartSelector>& part) {
  DiachronicDataset ds = archive.dataset(dataset);
  auto resource = maybe_resource(archive, ds, part);
  DatasetInstantiation inst = selector.resolve(archive, ds.slug);
  LoadedVersion v = archive.get_version(ds.slug, inst.label);
  FactSet facts = v.records.facts();
  if (!part) return facts;
  return select_part(facts, *part, resource, inst, v.records);
}

Timeline longitudinal_query(const Archive& archive, std::string_view dataset, const std::optional<PartSelector>& part,
                            std::optional<Timestamp> from, std::optional<Timestamp> to) {
  DiachronicDataset ds = archive.dataset(dataset);
  auto resource = maybe_resource(archive, ds, part);
  Timeline timeline;
  for (const auto& inst : archive.versions(ds.slug)) {
    if (!interval_overlaps(inst.temporal.transaction_time, from, to)) continue;
    LoadedVersion v = archive.get_version(ds.slug, inst.label);
    FactSet facts = v.records.facts();
    if (part) facts = select_part(facts, *part, resource, inst, v.records);
    timeline.push_back({inst.version_id, inst.label, inst.temporal.transaction_time.start, std::move(facts)});
  }
  return timeline;
}

ChangeSet filter_change_types(const ChangeSet& cs, const std::set<std::string>& type_filter) {
  ChangeSet out{cs.dataset_id, cs.from_version, cs.to_version, {}, {}};
  for (const auto& h : cs.high_level) {
    if (type_filter.contains(h.name)) out.high_level.push_back(h);
  }
  for (const auto& c : cs.low_level) {
    bool keep = type_filter.contains(std::string(change_op_name(c.op)));
    for (const auto& h : out.high_level) {
      if (keep) break;
      keep = std::find(h.constituents.begin(), h.constituents.end(), c) != h.constituents.end();
    }
    if (keep) out.low_level.push_back(c);
  }
  return out;
}

ChangeSet changes_query(const Archive& archive, std::string_view dataset, std::string_view v_from,
                        std::string_view v_to, const std::optional<std::set<std::string>>& type_filter,
                        const std::optional<PartSelector>& part) {
  DiachronicDataset ds = archive.dataset(dataset);
  auto resource = maybe_resource(archive, ds, part);
  auto versions = archive.versions(ds.slug);
  DatasetInstantiation from = archive.instantiation(ds.slug, v_from);
  DatasetInstantiation to = archive.instantiation(ds.slug, v_to);
  const std::size_t i_from = version_index(versions, from);
  const std::size_t i_to = version_index(versions, to);
  if (i_from >= i_to) {
    throw Error(ErrorCode::kVersionOrderError, from.label + " does not precede " + to.label);
  }

  std::optional<ChangeSet> cs;
  if (i_to == i_from + 1) {
    if (auto text = archive.cached_changeset_text(ds.slug, from, to)) cs = parse_changeset(*text);
  }
  std::optional<LoadedVersion> a, b;
  if (!cs || (part && std::holds_alternative<ResourcePart>(*part))) {
    a = archive.get_version(ds.slug, from.label);
    b = archive.get_version(ds.slug, to.label);
  }
  if (!cs) {
    cs = derive_high_level(compute_delta(VersionView{ds.diachronic_id, from.version_id, a->schema, a->records},
                                         VersionView{ds.diachronic_id, to.version_id, b->schema, b->records}),
                           builtin_rules());
  }

  ChangeSet result = std::move(*cs);
  if (part) {
    std::visit(Overloaded{
                   [&](const SubjectPart& p) {
                     result = restrict_changes(
                         result, [&](const Fact& f) { return contains(p.subjects, f.subject); },
                         [&](const SchemaObject& o) { return contains(p.subjects, o.id); });
                   },
                   [&](const PredicatePart& p) {
                     result = restrict_changes(
                         result, [&](const Fact& f) { return contains(p.predicates, f.attribute.predicate); },
                         [&](const SchemaObject& o) { return contains(p.predicates, o.id); });
                   },
                   [&](const ResourcePart&) {
                     FactSet context = evaluate_resource(*resource, from.version_id, from.label, a->records).facts;
                     context.merge(evaluate_resource(*resource, to.version_id, to.label, b->records).facts);
                     result = restrict_changes(
                         result, [&](const Fact& f) { return context.contains(f); },
                         [](const SchemaObject&) { return false; });
                   },
               },
               *part);
  }
  if (type_filter) result = filter_change_types(result, *type_filter);
  return result;
}

std::vector<MixedQueryHit> mixed_query(const Archive& archive, const std::set<std::string>& type_filter,
                                       std::optional<Timestamp> from, std::optional<Timestamp> to) {
  std::vector<MixedQueryHit> hits;
  for (const auto& ds : archive.list_datasets()) {
    auto versions = archive.versions(ds.slug);
    MixedQueryHit hit{ds.diachronic_id, {}, {}};
    std::set<Identifier> affected;
    for (std::size_t i = 1; i < versions.size(); ++i) {
      const Timestamp at = versions[i].temporal.transaction_time.start;
      if ((from && at < *from) || (to && at > *to)) continue;
      auto text = archive.cached_changeset_text(ds.slug, versions[i - 1], versions[i]);
      if (!text) continue;
      ChangeSet cs = filter_change_types(parse_changeset(*text), type_filter);
      if (cs.low_level.empty()) continue;
      for (const auto& c : cs.low_level) affected.insert(c.subject);
      hit.changeset_files.push_back(
          std::filesystem::relative(archive.changeset_path(ds, versions[i - 1], versions[i]), archive.root())
              .generic_string());
    }
    if (affected.empty()) continue;
    hit.affected.assign(affected.begin(), affected.end());
    hits.push_back(std::move(hit));
  }
  return hits;
}

}  // namespace evoarch
