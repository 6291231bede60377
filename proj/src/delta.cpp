#include "evoarch/delta.hpp"

#include <algorithm>
#include <map>

#include "evoarch/error.hpp"
#include "evoarch/facts_format.hpp"

namespace evoarch {

std::string_view change_op_name(ChangeOp op) {
  switch (op) {
    case ChangeOp::kAddAttribute: return "add-attribute";
    case ChangeOp::kAddRecord: return "add-record";
    case ChangeOp::kAddSchemaObject: return "add-schema-object";
    case ChangeOp::kDeleteAttribute: return "delete-attribute";
    case ChangeOp::kDeleteRecord: return "delete-record";
    case ChangeOp::kDeleteSchemaObject: return "delete-schema-object";
  }
  return "add-attribute";
}

std::optional<ChangeOp> try_parse_change_op(std::string_view name) {
  for (auto op : {ChangeOp::kAddAttribute, ChangeOp::kAddRecord, ChangeOp::kAddSchemaObject,
                  ChangeOp::kDeleteAttribute, ChangeOp::kDeleteRecord, ChangeOp::kDeleteSchemaObject}) {
    if (change_op_name(op) == name) return op;
  }
  return std::nullopt;
}

bool is_addition(ChangeOp op) {
  return op == ChangeOp::kAddAttribute || op == ChangeOp::kAddRecord ||
         op == ChangeOp::kAddSchemaObject;
}

ChangeOp inverse_op(ChangeOp op) {
  switch (op) {
    case ChangeOp::kAddAttribute: return ChangeOp::kDeleteAttribute;
    case ChangeOp::kAddRecord: return ChangeOp::kDeleteRecord;
    case ChangeOp::kAddSchemaObject: return ChangeOp::kDeleteSchemaObject;
    case ChangeOp::kDeleteAttribute: return ChangeOp::kAddAttribute;
    case ChangeOp::kDeleteRecord: return ChangeOp::kAddRecord;
    case ChangeOp::kDeleteSchemaObject: return ChangeOp::kAddSchemaObject;
  }
  return op;
}

void ChangeSet::normalize() {
  std::sort(low_level.begin(), low_level.end());
  low_level.erase(std::unique(low_level.begin(), low_level.end()), low_level.end());
}

ChangeSet compute_delta(const VersionView& from, const VersionView& to) {
  if (from.dataset_id != to.dataset_id) {
    throw Error(ErrorCode::kDatasetMismatch, "cannot diff " + from.dataset_id.value + " against " +
                                                 to.dataset_id.value);
  }
  ChangeSet cs{from.dataset_id, from.version_id, to.version_id, {}, {}};

  // Both maps are ordered by subject; walk them in lockstep.
  const auto& a = from.records.records();
  const auto& b = to.records.records();
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      cs.low_level.push_back({ChangeOp::kDeleteRecord, ia->first, ia->second});
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      cs.low_level.push_back({ChangeOp::kAddRecord, ib->first, ib->second});
      ++ib;
    } else {
      const auto& old_attrs = ia->second.attributes;
      const auto& new_attrs = ib->second.attributes;
      std::vector<RecordAttribute> diff;
      std::set_difference(old_attrs.begin(), old_attrs.end(), new_attrs.begin(), new_attrs.end(),
                          std::back_inserter(diff));
      for (auto& attr : diff) cs.low_level.push_back({ChangeOp::kDeleteAttribute, ia->first, std::move(attr)});
      diff.clear();
      std::set_difference(new_attrs.begin(), new_attrs.end(), old_attrs.begin(), old_attrs.end(),
                          std::back_inserter(diff));
      for (auto& attr : diff) cs.low_level.push_back({ChangeOp::kAddAttribute, ia->first, std::move(attr)});
      ++ia;
      ++ib;
    }
  }

  const auto& sa = from.schema.objects();
  const auto& sb = to.schema.objects();
  for (const auto& [id, obj] : sa) {
    auto it = sb.find(id);
    if (it == sb.end() || !(it->second == obj)) cs.low_level.push_back({ChangeOp::kDeleteSchemaObject, id, obj});
  }
  for (const auto& [id, obj] : sb) {
    auto it = sa.find(id);
    if (it == sa.end() || !(it->second == obj)) cs.low_level.push_back({ChangeOp::kAddSchemaObject, id, obj});
  }
  cs.normalize();
  return cs;
}

namespace {

[[noreturn]] void inapplicable(const LowLevelChange& c, std::string_view why) {
  throw Error(ErrorCode::kInapplicableDelta, std::string(change_op_name(c.op)) + " on " +
                                                 c.subject.value + ": " + std::string(why));
}

}  // namespace

AppliedVersion apply_delta(const SchemaVersion& schema, const RecordSet& records, const ChangeSet& cs) {
  std::map<Identifier, SchemaObject> objects = schema.objects();
  std::map<Identifier, Record> recs = records.records();

  auto apply_one = [&](const LowLevelChange& c) {
    switch (c.op) {
      case ChangeOp::kDeleteAttribute: {
        auto it = recs.find(c.subject);
        const auto& attr = std::get<RecordAttribute>(c.payload);
        if (it == recs.end() || !it->second.attributes.erase(attr)) inapplicable(c, "attribute absent");
        break;
      }
      case ChangeOp::kDeleteRecord: {
        auto it = recs.find(c.subject);
        const auto& rec = std::get<Record>(c.payload);
        if (it == recs.end() || it->second.attributes != rec.attributes) inapplicable(c, "record absent or different");
        recs.erase(it);
        break;
      }
      case ChangeOp::kDeleteSchemaObject: {
        auto it = objects.find(c.subject);
        if (it == objects.end() || !(it->second == std::get<SchemaObject>(c.payload)))
          inapplicable(c, "schema object absent or different");
        objects.erase(it);
        break;
      }
      case ChangeOp::kAddAttribute: {
        auto it = recs.find(c.subject);
        if (it == recs.end()) inapplicable(c, "subject absent");
        if (!it->second.attributes.insert(std::get<RecordAttribute>(c.payload)).second)
          inapplicable(c, "attribute already present");
        break;
      }
      case ChangeOp::kAddRecord: {
        const auto& rec = std::get<Record>(c.payload);
        if (rec.attributes.empty()) inapplicable(c, "empty record");
        if (!recs.emplace(c.subject, rec).second) inapplicable(c, "subject already present");
        break;
      }
      case ChangeOp::kAddSchemaObject: {
        if (!objects.emplace(c.subject, std::get<SchemaObject>(c.payload)).second)
          inapplicable(c, "schema object already present");
        break;
      }
    }
  };

  for (const auto& c : cs.low_level)
    if (!is_addition(c.op)) apply_one(c);
  for (const auto& c : cs.low_level)
    if (is_addition(c.op)) apply_one(c);

  std::vector<SchemaObject> obj_list;
  obj_list.reserve(objects.size());
  for (auto& [_, o] : objects) obj_list.push_back(std::move(o));
  // A subject whose last attribute was deleted is gone.
  std::vector<Record> rec_list;
  rec_list.reserve(recs.size());
  for (auto& [_, r] : recs)
    if (!r.attributes.empty()) rec_list.push_back(std::move(r));
  return {SchemaVersion(std::move(obj_list)), RecordSet(std::move(rec_list))};
}

ChangeSet invert_delta(const ChangeSet& cs) {
  auto invert = [](LowLevelChange c) {
    c.op = inverse_op(c.op);
    return c;
  };
  ChangeSet out{cs.dataset_id, cs.to_version, cs.from_version, {}, {}};
  out.low_level.reserve(cs.low_level.size());
  for (const auto& c : cs.low_level) out.low_level.push_back(invert(c));
  out.normalize();
  for (const auto& h : cs.high_level) {
    HighLevelChange inv = h;
    for (auto& c : inv.constituents) c = invert(c);
    out.high_level.push_back(std::move(inv));
  }
  return out;
}

std::set<SignedFact> fact_changes(const ChangeSet& cs) {
  std::set<SignedFact> out;
  for (const auto& c : cs.low_level) {
    const bool added = is_addition(c.op);
    if (const auto* attr = std::get_if<RecordAttribute>(&c.payload)) {
      out.insert({added, Fact{c.subject, *attr}});
    } else if (const auto* rec = std::get_if<Record>(&c.payload)) {
      for (const auto& a : rec->attributes) out.insert({added, Fact{c.subject, a}});
    }
  }
  return out;
}

ChangeSet restrict_changes(const ChangeSet& cs, const std::function<bool(const Fact&)>& keep_fact,
                           const std::function<bool(const SchemaObject&)>& keep_schema) {
  ChangeSet out{cs.dataset_id, cs.from_version, cs.to_version, {}, {}};
  for (const auto& c : cs.low_level) {
    if (const auto* attr = std::get_if<RecordAttribute>(&c.payload)) {
      if (keep_fact(Fact{c.subject, *attr})) out.low_level.push_back(c);
    } else if (const auto* rec = std::get_if<Record>(&c.payload)) {
      Record trimmed{rec->record_id, rec->subject, {}};
      for (const auto& a : rec->attributes)
        if (keep_fact(Fact{c.subject, a})) trimmed.attributes.insert(a);
      if (!trimmed.attributes.empty()) out.low_level.push_back({c.op, c.subject, std::move(trimmed)});
    } else if (keep_schema(std::get<SchemaObject>(c.payload))) {
      out.low_level.push_back(c);
    }
  }
  out.normalize();
  for (const auto& h : cs.high_level) {
    bool intact = std::all_of(h.constituents.begin(), h.constituents.end(), [&](const LowLevelChange& c) {
      return std::binary_search(out.low_level.begin(), out.low_level.end(), c);
    });
    if (intact) out.high_level.push_back(h);
  }
  return out;
}

}  // namespace evoarch
