#include <gtest/gtest.h>

#include <algorithm>

#include "evoarch/error.hpp"
#include "evoarch/resource.hpp"
#include "evoarch/rules.hpp"
#include "test_support.hpp"

namespace evoarch {
namespace {

using testing::at;
using testing::iri;
using testing::lit_fact;
using testing::prov;
using testing::ref_fact;
using testing::TempDir;

const std::string kEmp1 = "evoarch:ds/employees/rec/1";
const std::string kEmp2 = "evoarch:ds/employees/rec/2";
const std::string kEmp3 = "evoarch:ds/employees/rec/3";
const std::string kDept9 = "evoarch:ds/employees/rec/dept/9";
const std::string kName = "http://x/name";
const std::string kDept = "http://x/dept";
const std::string kType = std::string(kRdfType);
const std::string kEmployee = "http://x/Employee";
const Identifier kDsId = iri("evoarch:ds/employees");

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIoError;
}

FactSet base_facts() {
  return {lit_fact(kEmp1, kName, "Ann"),     ref_fact(kEmp1, kDept, kDept9), ref_fact(kEmp1, kType, kEmployee),
          lit_fact(kEmp2, kName, "Bo"),      ref_fact(kEmp2, kType, kEmployee),
          lit_fact(kDept9, kName, "Sales"),  lit_fact(kDept9, "http://x/floor", "3", Datatype::kInteger)};
}

ResourceIdentification explicit_ids(std::vector<std::string> ids) {
  ResourceIdentification ident;
  ident.mode = ResourceIdentification::Mode::kExplicitSubjects;
  for (auto& s : ids) ident.subjects.push_back(iri(s));
  return ident;
}

ResourceIdentification where_type(const std::string& cls) {
  ResourceIdentification ident;
  ident.mode = ResourceIdentification::Mode::kPredicateValueCondition;
  ident.predicate = iri(kType);
  ident.value = ObjectValue(iri(cls));
  return ident;
}

FactSet facts_of(const FactSet& all, const std::string& subject) {
  FactSet out;
  for (const auto& f : all)
    if (f.subject.value == subject) out.insert(f);
  return out;
}

TEST(ResourceDefinition, ValidationAndJson) {
  auto r = make_resource("staff", kDsId, explicit_ids({kEmp1, kEmp2}), {});
  EXPECT_EQ(r.resource_id.value, "evoarch:res/staff");
  EXPECT_EQ(r.resource_id.scope, IdScope::kDiachronic);
  EXPECT_EQ(r.identification.subjects.size(), 2u);

  ResourceDescription names_only{std::vector<Identifier>{iri(kName)}, 0};
  auto cond = make_resource("emps", kDsId, where_type(kEmployee), names_only);
  auto back = resource_from_json(resource_to_json(cond));
  EXPECT_EQ(back.resource_id, cond.resource_id);
  EXPECT_EQ(back.identification.value, cond.identification.value);
  EXPECT_EQ(back.description.predicate_whitelist, cond.description.predicate_whitelist);

  ResourceIdentification lit_cond;
  lit_cond.mode = ResourceIdentification::Mode::kPredicateValueCondition;
  lit_cond.predicate = iri(kName);
  lit_cond.value = ObjectValue(Literal::make("Ann", Datatype::kString));
  auto lit_back = resource_from_json(resource_to_json(make_resource("ann", kDsId, lit_cond, {})));
  EXPECT_EQ(lit_back.identification.value, lit_cond.value);

  EXPECT_EQ(code_of([&] { make_resource("deep", kDsId, explicit_ids({kEmp1}), {std::nullopt, 4}); }),
            ErrorCode::kValidationError);
  EXPECT_EQ(code_of([&] { make_resource("none", kDsId, explicit_ids({}), {}); }), ErrorCode::kValidationError);
  ResourceIdentification mixed = explicit_ids({kEmp1});
  mixed.predicate = iri(kName);
  EXPECT_EQ(code_of([&] { make_resource("mixed", kDsId, mixed, {}); }), ErrorCode::kValidationError);
  EXPECT_EQ(code_of([] { resource_from_json("{\"name\": 3}"); }), ErrorCode::kValidationError);
}

TEST(ResourceEvaluation, ExplicitAndExpansion) {
  auto facts = base_facts();
  auto rs = RecordSet::from_facts(facts, "employees");
  auto v = iri("evoarch:ds/employees/v/v0001");

  auto depth0 = evaluate_resource(make_resource("one", kDsId, explicit_ids({kEmp1}), {}), v, "v0001", rs);
  EXPECT_EQ(depth0.facts, facts_of(facts, kEmp1));
  EXPECT_EQ(depth0.facts.size(), 3u);
  EXPECT_EQ(depth0.context_id.value, "evoarch:res/one/v/v0001");

  auto depth1 = evaluate_resource(make_resource("one", kDsId, explicit_ids({kEmp1}), {std::nullopt, 1}), v,
                                  "v0001", rs);
  EXPECT_EQ(depth1.facts.size(), 3u + 2u);
  EXPECT_TRUE(std::includes(depth1.facts.begin(), depth1.facts.end(), depth0.facts.begin(), depth0.facts.end()));

  ResourceDescription names{std::vector<Identifier>{iri(kName)}, 0};
  auto cond = evaluate_resource(make_resource("emps", kDsId, where_type(kEmployee), names), v, "v0001", rs);
  EXPECT_EQ(cond.matched_subjects, (std::vector<Identifier>{iri(kEmp1), iri(kEmp2)}));
  EXPECT_EQ(cond.facts, (FactSet{lit_fact(kEmp1, kName, "Ann"), lit_fact(kEmp2, kName, "Bo")}));

  auto none = evaluate_resource(make_resource("ghost", kDsId, explicit_ids({kEmp3}), {}), v, "v0001", rs);
  EXPECT_TRUE(none.facts.empty());
  EXPECT_TRUE(none.matched_subjects.empty());
}

TEST(ResourceEvaluation, ExpansionFollowsFilteredRefsOnly) {
  auto rs = RecordSet::from_facts(base_facts(), "employees");
  ResourceDescription names{std::vector<Identifier>{iri(kName)}, 2};
  auto ctx = evaluate_resource(make_resource("one", kDsId, explicit_ids({kEmp1}), names),
                               iri("evoarch:ds/employees/v/v0001"), "v0001", rs);
  // the dept ref is filtered out at level 0, so nothing is reached
  EXPECT_EQ(ctx.facts, (FactSet{lit_fact(kEmp1, kName, "Ann")}));
}

class ResourceArchiveTest : public ::testing::Test {
 protected:
  void SetUp() override {
    Archive::init(dir_.path() / "ar");
    archive_.emplace(dir_.path() / "ar");
    archive_->register_dataset("Employees", SourceModel::kRdf);
    archive_->register_dataset("Other", SourceModel::kRdf);
    auto v1 = base_facts();
    auto v2 = v1;
    v2.erase(lit_fact(kEmp1, kName, "Ann"));
    v2.insert(lit_fact(kEmp1, kName, "Anne"));
    v2.erase(lit_fact(kEmp2, kName, "Bo"));
    v2.insert(lit_fact(kEmp2, kName, "Bob"));
    v2.erase(ref_fact(kEmp2, kType, kEmployee));
    v2.insert(ref_fact(kEmp2, kType, "http://x/Contractor"));
    archive_->commit_version("employees", SchemaVersion(), RecordSet::from_facts(v1, "employees"),
                             at("2015-01-01T00:00:00Z"), prov());
    archive_->commit_version("employees", SchemaVersion(), RecordSet::from_facts(v2, "employees"),
                             at("2016-01-01T00:00:00Z"), prov());
  }
  TempDir dir_;
  std::optional<Archive> archive_;
};

TEST_F(ResourceArchiveTest, DefineAndLoad) {
  auto r = define_resource(*archive_, "employees", explicit_ids({kEmp1}), {}, "ann");
  EXPECT_EQ(load_resource(*archive_, "ann").resource_id, r.resource_id);
  EXPECT_EQ(code_of([&] { define_resource(*archive_, "employees", explicit_ids({kEmp2}), {}, "ann"); }),
            ErrorCode::kResourceExists);
  EXPECT_EQ(code_of([&] { define_resource(*archive_, "ghost", explicit_ids({kEmp2}), {}, "g"); }),
            ErrorCode::kDatasetNotFound);
  EXPECT_EQ(code_of([&] { load_resource(*archive_, "nobody"); }), ErrorCode::kResourceNotFound);
}

TEST_F(ResourceArchiveTest, DiffInsideAndOutsideContext) {
  auto r = define_resource(*archive_, "employees", explicit_ids({kEmp1}), {}, "ann");
  auto cs = resource_diff(*archive_, r, "v0001", "v0002");
  ASSERT_EQ(cs.low_level.size(), 2u);
  ASSERT_EQ(cs.high_level.size(), 1u);
  EXPECT_EQ(cs.high_level[0].name, "value-update");
  EXPECT_NE(std::find(cs.high_level[0].context.begin(), cs.high_level[0].context.end(), r.resource_id),
            cs.high_level[0].context.end());

  auto dept = define_resource(*archive_, "employees", explicit_ids({kDept9}), {}, "dept");
  EXPECT_TRUE(resource_diff(*archive_, dept, "v0001", "v0002").empty());
}

TEST_F(ResourceArchiveTest, SubjectLeavingConditionShowsAsDeletes) {
  auto r = define_resource(*archive_, "employees", where_type(kEmployee), {}, "emps");
  auto c1 = evaluate_resource(*archive_, r, "v0001");
  auto c2 = evaluate_resource(*archive_, r, "v0002");
  EXPECT_EQ(c1.matched_subjects.size(), 2u);
  EXPECT_EQ(c2.matched_subjects.size(), 1u);
  auto cs = resource_diff(*archive_, r, "v0001", "v0002");
  std::size_t emp2_deletes = 0;
  for (const auto& c : cs.low_level) {
    if (c.subject.value == kEmp2 && c.op == ChangeOp::kDeleteAttribute) ++emp2_deletes;
  }
  // name Bo and the Employee type both leave the context
  EXPECT_EQ(emp2_deletes, 2u);
}

TEST_F(ResourceArchiveTest, WrongDatasetIsRejected) {
  auto r = make_resource("elsewhere", iri("evoarch:ds/other"), explicit_ids({kEmp1}), {});
  EXPECT_EQ(code_of([&] { evaluate_resource(*archive_, r, "evoarch:ds/employees/v/v0001"); }),
            ErrorCode::kDatasetMismatch);
}

}  // namespace
}  // namespace evoarch
