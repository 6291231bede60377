#include "evoarch/resource.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "evoarch/changeset_format.hpp"
#include "evoarch/error.hpp"
#include "evoarch/rules.hpp"

namespace evoarch {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::kValidationError, msg); }

// Full version ids name their dataset; reject ones from another dataset.
void check_version_dataset(const DiachronicResource& r, std::string_view version) {
  if (!version.starts_with("evoarch:ds/")) return;
  Identifier ds = dataset_of_version(parse_identifier(version));
  if (ds != r.dataset_id) {
    throw Error(ErrorCode::kDatasetMismatch,
                "version " + std::string(version) + " is not in " + r.dataset_id.value);
  }
}

bool passes_filter(const ResourceDescription& d, const Identifier& predicate) {
  if (!d.predicate_whitelist) return true;
  const auto& w = *d.predicate_whitelist;
  return std::find(w.begin(), w.end(), predicate) != w.end();
}

json object_json(const ObjectValue& o) {
  if (const auto* lit = std::get_if<Literal>(&o)) {
    return {{"literal", lit->lexical}, {"datatype", std::string(datatype_name(lit->datatype))}};
  }
  return {{"ref", std::get<Identifier>(o).value}};
}

}  // namespace

void DiachronicResource::validate() const {
  if (name.empty()) invalid("resource name is empty");
  using Mode = ResourceIdentification::Mode;
  if (identification.mode == Mode::kExplicitSubjects) {
    if (identification.subjects.empty()) invalid("explicit-subjects resource lists no subjects");
    if (identification.predicate || identification.value) invalid("explicit-subjects resource carries a condition");
  } else {
    if (!identification.predicate || !identification.value) invalid("condition resource needs predicate and value");
    if (!identification.subjects.empty()) invalid("condition resource lists explicit subjects");
  }
  if (description.expansion_depth < 0 || description.expansion_depth > kMaxExpansionDepth) {
    invalid("expansion depth must be between 0 and " + std::to_string(kMaxExpansionDepth));
  }
}

DiachronicResource make_resource(std::string_view name, const Identifier& dataset_id,
                                 ResourceIdentification identification, ResourceDescription description) {
  DiachronicResource r;
  r.name = std::string(name);
  if (!name.empty()) r.resource_id = mint_identifier(MintKind::kResource, {r.name});
  r.dataset_id = dataset_id;
  r.identification = std::move(identification);
  r.description = std::move(description);
  r.validate();
  return r;
}

std::string resource_to_json(const DiachronicResource& r) {
  json j;
  j["name"] = r.name;
  j["dataset"] = r.dataset_id.value;
  json ident;
  if (r.identification.mode == ResourceIdentification::Mode::kExplicitSubjects) {
    ident["mode"] = "explicit-subjects";
    ident["subjects"] = json::array();
    for (const auto& s : r.identification.subjects) ident["subjects"].push_back(s.value);
  } else {
    ident["mode"] = "predicate-value-condition";
    json cond = object_json(*r.identification.value);
    cond["predicate"] = r.identification.predicate->value;
    ident["condition"] = cond;
  }
  j["identification"] = ident;
  json desc;
  if (r.description.predicate_whitelist) {
    desc["predicates"] = json::array();
    for (const auto& p : *r.description.predicate_whitelist) desc["predicates"].push_back(p.value);
  } else {
    desc["predicates"] = "all";
  }
  desc["depth"] = r.description.expansion_depth;
  j["description"] = desc;
  return j.dump(2) + "\n";
}

DiachronicResource resource_from_json(std::string_view json_text) {
  try {
    json j = json::parse(json_text);
    ResourceIdentification ident;
    const json& ji = j.at("identification");
    const std::string mode = ji.at("mode").get<std::string>();
    if (mode == "explicit-subjects") {
      ident.mode = ResourceIdentification::Mode::kExplicitSubjects;
      for (const auto& s : ji.at("subjects")) ident.subjects.push_back(parse_identifier(s.get<std::string>()));
    } else if (mode == "predicate-value-condition") {
      ident.mode = ResourceIdentification::Mode::kPredicateValueCondition;
      const json& c = ji.at("condition");
      ident.predicate = parse_identifier(c.at("predicate").get<std::string>());
      if (c.contains("ref")) {
        ident.value = parse_identifier(c.at("ref").get<std::string>());
      } else {
        Datatype dt = c.contains("datatype") ? parse_datatype(c.at("datatype").get<std::string>()) : Datatype::kString;
        ident.value = Literal::make(c.at("literal").get<std::string>(), dt);
      }
    } else {
      invalid("unknown identification mode '" + mode + "'");
    }
    ResourceDescription desc;
    if (j.contains("description")) {
      const json& jd = j.at("description");
      if (jd.contains("predicates") && jd.at("predicates").is_array()) {
        desc.predicate_whitelist.emplace();
        for (const auto& p : jd.at("predicates")) desc.predicate_whitelist->push_back(parse_identifier(p.get<std::string>()));
      } else if (jd.contains("predicates") && jd.at("predicates") != "all") {
        invalid("description.predicates must be \"all\" or a list");
      }
      if (jd.contains("depth")) desc.expansion_depth = jd.at("depth").get<int>();
    }
    return make_resource(j.at("name").get<std::string>(),
                         Identifier::uri(j.at("dataset").get<std::string>(), IdScope::kDiachronic), std::move(ident),
                         std::move(desc));
  } catch (const json::exception& e) {
    invalid(std::string("malformed resource definition: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kValidationError) throw;
    invalid(std::string("malformed resource definition: ") + e.what());
  }
}

DiachronicResource define_resource(Archive& archive, std::string_view dataset, ResourceIdentification identification,
                                   ResourceDescription description, std::string_view name) {
  DiachronicDataset ds = archive.dataset(dataset);
  DiachronicResource r = make_resource(name, ds.diachronic_id, std::move(identification), std::move(description));
  archive.put_resource_definition(r.name, resource_to_json(r));
  return r;
}

DiachronicResource load_resource(const Archive& archive, std::string_view name) {
  return resource_from_json(archive.resource_definition(name));
}

ResourceContext evaluate_resource(const DiachronicResource& r, const Identifier& version_id,
                                  std::string_view version_label, const RecordSet& records) {
  ResourceContext ctx;
  ctx.resource_id = r.resource_id;
  ctx.version_id = version_id;
  ctx.context_id = Identifier::uri(r.resource_id.value + "/v/" + encode_component(version_label));

  std::set<Identifier> level;
  if (r.identification.mode == ResourceIdentification::Mode::kExplicitSubjects) {
    for (const auto& s : r.identification.subjects)
      if (records.find(s)) level.insert(s);
  } else {
    const RecordAttribute wanted{*r.identification.predicate, *r.identification.value};
    for (const auto& [subject, rec] : records.records())
      if (rec.attributes.contains(wanted)) level.insert(subject);
  }
  ctx.matched_subjects.assign(level.begin(), level.end());

  std::set<Identifier> visited;
  for (int depth = 0; !level.empty(); ++depth) {
    std::set<Identifier> next;
    for (const auto& subject : level) {
      const Record* rec = records.find(subject);
      if (!rec) continue;
      visited.insert(subject);
      for (const auto& a : rec->attributes) {
        if (!passes_filter(r.description, a.predicate)) continue;
        ctx.facts.insert(Fact{subject, a});
        if (const auto* ref = std::get_if<Identifier>(&a.object)) {
          if (depth < r.description.expansion_depth && records.find(*ref) && !visited.contains(*ref)) next.insert(*ref);
        }
      }
    }
    level = std::move(next);
  }
  return ctx;
}

ResourceContext evaluate_resource(const Archive& archive, const DiachronicResource& r, std::string_view version) {
  check_version_dataset(r, version);
  DiachronicDataset ds = archive.dataset(r.dataset_id.value);
  if (ds.diachronic_id != r.dataset_id) throw Error(ErrorCode::kDatasetMismatch, "resource bound to another dataset");
  DatasetInstantiation inst = archive.instantiation(r.dataset_id.value, version);
  if (inst.diachronic_id != r.dataset_id) {
    throw Error(ErrorCode::kDatasetMismatch, "version " + inst.version_id.value + " is not in " + r.dataset_id.value);
  }
  LoadedVersion v = archive.get_version(r.dataset_id.value, inst.label);
  return evaluate_resource(r, inst.version_id, inst.label, v.records);
}

ChangeSet resource_diff(const DiachronicResource& r, const VersionView& from, std::string_view from_label,
                        const VersionView& to, std::string_view to_label) {
  if (from.dataset_id != r.dataset_id || to.dataset_id != r.dataset_id) {
    throw Error(ErrorCode::kDatasetMismatch, "resource " + r.name + " is bound to " + r.dataset_id.value);
  }
  FactSet context = evaluate_resource(r, from.version_id, from_label, from.records).facts;
  context.merge(evaluate_resource(r, to.version_id, to_label, to.records).facts);

  ChangeSet full = compute_delta(from, to);
  ChangeSet restricted = restrict_changes(
      full, [&](const Fact& f) { return context.contains(f); }, [](const SchemaObject&) { return false; });
  restricted = derive_high_level(std::move(restricted), builtin_rules());
  for (auto& h : restricted.high_level) h.context.push_back(r.resource_id);
  return restricted;
}

ChangeSet resource_diff(const Archive& archive, const DiachronicResource& r, std::string_view v_from,
                        std::string_view v_to) {
  check_version_dataset(r, v_from);
  check_version_dataset(r, v_to);
  LoadedVersion a = archive.get_version(r.dataset_id.value, v_from);
  LoadedVersion b = archive.get_version(r.dataset_id.value, v_to);
  return resource_diff(r, VersionView{r.dataset_id, a.instantiation.version_id, a.schema, a.records},
                       a.instantiation.label,
                       VersionView{r.dataset_id, b.instantiation.version_id, b.schema, b.records},
                       b.instantiation.label);
}

}  // namespace evoarch
