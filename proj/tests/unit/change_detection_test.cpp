#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "evoarch/changeset_format.hpp"
#include "evoarch/delta.hpp"
#include "evoarch/error.hpp"
#include "evoarch/rules.hpp"
#include "test_support.hpp"

namespace evoarch {
namespace {

using testing::iri;
using testing::lit_fact;
using testing::ref_fact;

const Identifier kDs = iri("evoarch:ds/employees");
const Identifier kV1 = iri("evoarch:ds/employees/v/v0001");
const Identifier kV2 = iri("evoarch:ds/employees/v/v0002");
const std::string kRec1 = "evoarch:ds/employees/rec/1";
const std::string kRec2 = "evoarch:ds/employees/rec/2";
const std::string kName = "evoarch:ds/employees/schema/employees/name";
const std::string kSalary = "evoarch:ds/employees/schema/employees/salary";

struct Version {
  SchemaVersion schema;
  RecordSet records;
};

Version make(const FactSet& facts, std::vector<SchemaObject> schema = {}) {
  return {SchemaVersion(std::move(schema)), RecordSet::from_facts(facts, "employees")};
}

ChangeSet diff(const Version& a, const Version& b) {
  return compute_delta(VersionView{kDs, kV1, a.schema, a.records}, VersionView{kDs, kV2, b.schema, b.records});
}

ErrorCode code_of(const std::function<void()>& f, std::optional<std::size_t>* line = nullptr) {
  try {
    f();
  } catch (const Error& e) {
    if (line) *line = e.line();
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIoError;
}

FactSet employees_v1() {
  return {lit_fact(kRec1, kName, "Ann"), lit_fact(kRec1, kSalary, "3000", Datatype::kDecimal),
          lit_fact(kRec2, kName, "Bo")};
}

TEST(ComputeDelta, IdentityIsEmpty) {
  auto v = make(employees_v1());
  auto cs = diff(v, v);
  EXPECT_TRUE(cs.empty());
  EXPECT_EQ(cs.from_version, kV1);
  EXPECT_EQ(cs.to_version, kV2);
}

TEST(ComputeDelta, AttributeChange) {
  FactSet f2 = employees_v1();
  f2.erase(lit_fact(kRec1, kSalary, "3000", Datatype::kDecimal));
  f2.insert(lit_fact(kRec1, kSalary, "3200", Datatype::kDecimal));
  auto cs = diff(make(employees_v1()), make(f2));
  ASSERT_EQ(cs.low_level.size(), 2u);
  EXPECT_EQ(cs.low_level[0].op, ChangeOp::kAddAttribute);
  EXPECT_EQ(cs.low_level[1].op, ChangeOp::kDeleteAttribute);
  for (const auto& c : cs.low_level) {
    EXPECT_EQ(c.subject.value, kRec1);
    EXPECT_EQ(std::get<RecordAttribute>(c.payload).predicate.value, kSalary);
  }
}

TEST(ComputeDelta, WholeRecordsAreSingleOps) {
  FactSet f2 = employees_v1();
  const std::string rec3 = "evoarch:ds/employees/rec/3";
  f2.insert(lit_fact(rec3, kName, "Cy"));
  f2.insert(lit_fact(rec3, kSalary, "1", Datatype::kDecimal));
  f2.insert(ref_fact(rec3, "http://x/boss", kRec1));
  f2.erase(lit_fact(kRec2, kName, "Bo"));
  auto cs = diff(make(employees_v1()), make(f2));
  ASSERT_EQ(cs.low_level.size(), 2u);
  EXPECT_EQ(cs.low_level[0].op, ChangeOp::kAddRecord);
  EXPECT_EQ(std::get<Record>(cs.low_level[0].payload).attributes.size(), 3u);
  EXPECT_EQ(cs.low_level[1].op, ChangeOp::kDeleteRecord);
  EXPECT_EQ(cs.low_level[1].subject.value, kRec2);
}

TEST(ComputeDelta, SchemaChangesShareTheSet) {
  auto cls = SchemaObject::make_class(iri("evoarch:ds/employees/schema/employees"), SourceConstruct::kTable);
  auto p_int = SchemaObject::make_property(iri(kSalary), SourceConstruct::kColumn, cls.id, Datatype::kInteger);
  auto p_dec = SchemaObject::make_property(iri(kSalary), SourceConstruct::kColumn, cls.id, Datatype::kDecimal);
  auto cs = diff(make({}, {cls, p_int}), make({}, {cls, p_dec}));
  ASSERT_EQ(cs.low_level.size(), 2u);
  EXPECT_EQ(cs.low_level[0].op, ChangeOp::kAddSchemaObject);
  EXPECT_EQ(cs.low_level[1].op, ChangeOp::kDeleteSchemaObject);

  cs = derive_high_level(cs, builtin_rules());
  ASSERT_EQ(cs.high_level.size(), 1u);
  EXPECT_EQ(cs.high_level[0].name, "property-retyped");
  EXPECT_EQ(cs.high_level[0].context, std::vector<Identifier>{iri(kSalary)});
}

TEST(ComputeDelta, DatasetMismatch) {
  auto v = make(employees_v1());
  EXPECT_EQ(code_of([&] {
              compute_delta(VersionView{kDs, kV1, v.schema, v.records},
                            VersionView{iri("evoarch:ds/other"), iri("evoarch:ds/other/v/v0001"), v.schema,
                                        v.records});
            }),
            ErrorCode::kDatasetMismatch);
}

TEST(ApplyDelta, IdentityRoundTripAndGuards) {
  auto v1 = make(employees_v1());
  FactSet f2 = employees_v1();
  f2.erase(lit_fact(kRec2, kName, "Bo"));
  f2.insert(lit_fact(kRec2, kName, "Bob"));
  f2.insert(lit_fact("evoarch:ds/employees/rec/9", kName, "Z"));
  auto v2 = make(f2);
  auto cs = diff(v1, v2);

  ChangeSet empty{kDs, kV1, kV2, {}, {}};
  EXPECT_EQ(apply_delta(v1.schema, v1.records, empty).records.content_hash(), v1.records.content_hash());
  auto applied = apply_delta(v1.schema, v1.records, cs);
  EXPECT_EQ(applied.records.content_hash(), v2.records.content_hash());
  auto back = apply_delta(applied.schema, applied.records, invert_delta(cs));
  EXPECT_EQ(back.records.content_hash(), v1.records.content_hash());

  ChangeSet bad{kDs, kV1, kV2, {}, {}};
  bad.low_level.push_back(LowLevelChange{ChangeOp::kDeleteAttribute, iri(kRec1),
                                         RecordAttribute{iri(kName), Literal::make("Nobody", Datatype::kString)}});
  EXPECT_EQ(code_of([&] { apply_delta(v1.schema, v1.records, bad); }), ErrorCode::kInapplicableDelta);
  bad.low_level[0] = LowLevelChange{ChangeOp::kAddAttribute, iri(kRec1),
                                    RecordAttribute{iri(kName), Literal::make("Ann", Datatype::kString)}};
  EXPECT_EQ(code_of([&] { apply_delta(v1.schema, v1.records, bad); }), ErrorCode::kInapplicableDelta);
}

TEST(InvertDelta, Involution) {
  FactSet f2 = employees_v1();
  f2.erase(lit_fact(kRec1, kName, "Ann"));
  f2.insert(lit_fact(kRec1, kName, "Anne"));
  auto cs = derive_high_level(diff(make(employees_v1()), make(f2)), builtin_rules());
  ChangeSet empty{kDs, kV1, kV2, {}, {}};
  EXPECT_TRUE(invert_delta(empty).empty());
  EXPECT_EQ(invert_delta(invert_delta(cs)), cs);
  auto inv = invert_delta(cs);
  EXPECT_EQ(inv.from_version, kV2);
  ASSERT_EQ(inv.high_level.size(), 1u);
  for (const auto& c : inv.high_level[0].constituents) {
    EXPECT_TRUE(std::binary_search(inv.low_level.begin(), inv.low_level.end(), c));
  }
}

TEST(HighLevel, ValueUpdate) {
  FactSet f2 = employees_v1();
  f2.erase(lit_fact(kRec1, kSalary, "3000", Datatype::kDecimal));
  f2.insert(lit_fact(kRec1, kSalary, "3200", Datatype::kDecimal));
  auto base = diff(make(employees_v1()), make(f2));
  auto cs = derive_high_level(base, builtin_rules());
  EXPECT_EQ(cs.low_level, base.low_level);
  ASSERT_EQ(cs.high_level.size(), 1u);
  EXPECT_EQ(cs.high_level[0].name, "value-update");
  EXPECT_EQ(cs.high_level[0].context, (std::vector<Identifier>{iri(kRec1), iri(kSalary)}));
  EXPECT_EQ(cs.high_level[0].constituents.size(), 2u);
}

TEST(HighLevel, AddsOnlyYieldNothing) {
  FactSet f2 = employees_v1();
  f2.insert(lit_fact(kRec1, "http://x/nick", "A"));
  auto cs = derive_high_level(diff(make(employees_v1()), make(f2)), builtin_rules());
  EXPECT_TRUE(cs.high_level.empty());
}

// Two deletes and one add on the same (subject, predicate): exhaustive
// enumeration of pairings shows the maximum is one; greedy must take the
// sorted-first delete.
TEST(HighLevel, GreedyTieBreak) {
  LowLevelChange d1{ChangeOp::kDeleteAttribute, iri(kRec1), RecordAttribute{iri(kName), Literal::make("A", Datatype::kString)}};
  LowLevelChange d2{ChangeOp::kDeleteAttribute, iri(kRec1), RecordAttribute{iri(kName), Literal::make("B", Datatype::kString)}};
  LowLevelChange a1{ChangeOp::kAddAttribute, iri(kRec1), RecordAttribute{iri(kName), Literal::make("C", Datatype::kString)}};
  ChangeSet cs{kDs, kV1, kV2, {d2, a1, d1}, {}};
  cs.normalize();

  std::size_t best = 0;
  for (int mask = 0; mask < 4; ++mask) {  // which delete(s) pair with the single add
    std::size_t n = __builtin_popcount(mask);
    if (n <= 1) best = std::max(best, n);
  }
  auto out = derive_high_level(cs, builtin_rules());
  ASSERT_EQ(out.high_level.size(), best);
  EXPECT_EQ(out.high_level[0].constituents[0], d1);
  EXPECT_EQ(out.high_level[0].constituents[1], a1);
}

TEST(HighLevel, RecordReplaced) {
  Record old_rec{iri(kRec1), iri(kRec1), {RecordAttribute{iri(kName), Literal::make("A", Datatype::kString)}}};
  Record new_rec{iri(kRec1), iri(kRec1), {RecordAttribute{iri(kName), Literal::make("B", Datatype::kString)}}};
  ChangeSet cs{kDs, kV1, kV2,
               {LowLevelChange{ChangeOp::kDeleteRecord, iri(kRec1), old_rec},
                LowLevelChange{ChangeOp::kAddRecord, iri(kRec1), new_rec}},
               {}};
  cs.normalize();
  auto out = derive_high_level(cs, builtin_rules());
  ASSERT_EQ(out.high_level.size(), 1u);
  EXPECT_EQ(out.high_level[0].name, "record-replaced");
}

TEST(Rules, ParseAndUserRules) {
  auto rules = parse_rules(
      "# salary changes only\n"
      "rule salary-change: delete-attribute(?s,<" + kSalary + ">,?o1) & add-attribute(?s,<" + kSalary +
      ">,?o2) => context(?s)\n"
      "\n"
      "rule renamed-to-bob: add-attribute(?s,?p,\"Bob\") => context(?s,?p)\n");
  ASSERT_EQ(rules.size(), 2u);
  EXPECT_EQ(rules[0].pattern.size(), 2u);

  FactSet f2 = employees_v1();
  f2.erase(lit_fact(kRec1, kSalary, "3000", Datatype::kDecimal));
  f2.insert(lit_fact(kRec1, kSalary, "3200", Datatype::kDecimal));
  f2.erase(lit_fact(kRec2, kName, "Bo"));
  f2.insert(lit_fact(kRec2, kName, "Bob"));
  auto cs = derive_high_level(diff(make(employees_v1()), make(f2)), rules);
  ASSERT_EQ(cs.high_level.size(), 2u);
  EXPECT_EQ(cs.high_level[0].name, "salary-change");
  EXPECT_EQ(cs.high_level[0].context, std::vector<Identifier>{iri(kRec1)});
  EXPECT_EQ(cs.high_level[1].name, "renamed-to-bob");
  EXPECT_EQ(cs.high_level[1].context, (std::vector<Identifier>{iri(kRec2), iri(kName)}));
}

TEST(Rules, SyntaxErrorsCarryLineNumbers) {
  std::optional<std::size_t> line;
  EXPECT_EQ(code_of([] { parse_rules("rule ok: add-record(?s) => context(?s)\nrule bad add-record(?s)\n"); }, &line),
            ErrorCode::kRuleSyntaxError);
  EXPECT_EQ(line, 2u);
  EXPECT_EQ(code_of([] { parse_rules("rule x: add-attribute(?s) => context(?s)\n"); }), ErrorCode::kRuleSyntaxError);
  EXPECT_EQ(code_of([] { parse_rules("rule x: rename(?s) => context(?s)\n"); }), ErrorCode::kRuleSyntaxError);
  EXPECT_EQ(code_of([] { parse_rules("rule x: add-record(?s) => context(?q)\n"); }), ErrorCode::kRuleSyntaxError);
  EXPECT_EQ(code_of([] {
              parse_rules("rule x: add-record(?s) => context(?s)\nrule x: delete-record(?s) => context(?s)\n");
            }),
            ErrorCode::kRuleSyntaxError);
}

TEST(ChangesetFormat, LayoutAndRoundTrip) {
  FactSet f2 = employees_v1();
  f2.erase(lit_fact(kRec1, kSalary, "3000", Datatype::kDecimal));
  f2.insert(lit_fact(kRec1, kSalary, "3200", Datatype::kDecimal));
  f2.erase(lit_fact(kRec2, kName, "Bo"));
  auto cls = SchemaObject::make_class(iri("evoarch:ds/employees/schema/employees"), SourceConstruct::kTable);
  auto cs = derive_high_level(diff(make(employees_v1()), make(f2, {cls})), builtin_rules());
  cs.high_level[0].annotation = "raise\tapproved";
  std::string text = serialize_changeset(cs);
  EXPECT_EQ(text,
            "evoarch:ds/employees/v/v0001\tevoarch:ds/employees/v/v0002\n"
            "add-attribute\t" + kRec1 + "\t" + kSalary + "\tlit\t3200\tdecimal\n"
            "add-schema-object\tevoarch:ds/employees/schema/employees\tclass\ttable\t-\t-\n"
            "delete-attribute\t" + kRec1 + "\t" + kSalary + "\tlit\t3000\tdecimal\n"
            "delete-record\t" + kRec2 + "\t" + kName + "\tlit\tBo\tstring\n"
            "==HL==\n"
            "value-update\t" + kRec1 + " " + kSalary + "\t4,2\traise\\tapproved\n");
  EXPECT_EQ(parse_changeset(text), cs);
  ChangeSet empty{kDs, kV1, kV2, {}, {}};
  EXPECT_EQ(serialize_changeset(empty),
            "evoarch:ds/employees/v/v0001\tevoarch:ds/employees/v/v0002\n==HL==\n");
  EXPECT_EQ(parse_changeset(serialize_changeset(empty)), empty);
}

TEST(ChangesetFormat, RejectsMalformed) {
  EXPECT_EQ(code_of([] { parse_changeset("a\tb\n"); }), ErrorCode::kParseError);
  EXPECT_EQ(code_of([] { parse_changeset("evoarch:ds/e/v/v0001\tevoarch:ds/e/v/v0002\nfrob\tx\n==HL==\n"); }),
            ErrorCode::kParseError);
  EXPECT_EQ(code_of([] {
              parse_changeset("evoarch:ds/e/v/v0001\tevoarch:ds/e/v/v0002\n==HL==\nvalue-update\tx\t9\n");
            }),
            ErrorCode::kParseError);
}

TEST(RestrictChanges, TrimsRecordsAndDropsBrokenHighLevel) {
  FactSet f2 = employees_v1();
  f2.erase(lit_fact(kRec1, kSalary, "3000", Datatype::kDecimal));
  f2.insert(lit_fact(kRec1, kSalary, "3200", Datatype::kDecimal));
  f2.insert(lit_fact("evoarch:ds/employees/rec/3", kName, "Cy"));
  f2.insert(lit_fact("evoarch:ds/employees/rec/3", kSalary, "1", Datatype::kDecimal));
  auto cs = derive_high_level(diff(make(employees_v1()), make(f2)), builtin_rules());
  auto only_names = restrict_changes(
      cs, [](const Fact& f) { return f.attribute.predicate.value == kName; },
      [](const SchemaObject&) { return true; });
  ASSERT_EQ(only_names.low_level.size(), 1u);
  EXPECT_EQ(std::get<Record>(only_names.low_level[0].payload).attributes.size(), 1u);
  EXPECT_TRUE(only_names.high_level.empty());
}

}  // namespace
}  // namespace evoarch
