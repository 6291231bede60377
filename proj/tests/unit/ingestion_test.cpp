#include <gtest/gtest.h>

#include <map>
#include <set>

#include "evoarch/csv.hpp"
#include "evoarch/error.hpp"
#include "evoarch/ingest.hpp"
#include "evoarch/mapping.hpp"
#include "evoarch/ntriples.hpp"

namespace evoarch {
namespace {

const char* kEmployeesConfig = R"({
  "table_name": "employees",
  "columns": [{"name": "id", "datatype": "integer"}, {"name": "name", "datatype": "string"}],
  "primary_key": ["id"]
})";

const char* kCubeConfig = R"({
  "columns": [
    {"name": "year", "role": "dimension", "datatype": "integer"},
    {"name": "region", "role": "dimension", "datatype": "string"},
    {"name": "pop", "role": "measure", "datatype": "integer"}
  ]
})";

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

TEST(Csv, HeaderOnlyAndCardinality) {
  EXPECT_TRUE(parse_csv("a,b,c\n", 3).empty());
  auto rows = parse_csv("a,b,c\n1,2,3\n4,5,6\n", 3);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1], (CsvRow{"4", "5", "6"}));
}

TEST(Csv, QuotingAndLineEndings) {
  auto rows = parse_csv("a,b\r\n\"x, y\",\"say \"\"hi\"\"\"\r\n\"multi\nline\",\r\n", 2);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0][0], "x, y");
  EXPECT_EQ(rows[0][1], "say \"hi\"");
  EXPECT_EQ(rows[1][0], "multi\nline");
  EXPECT_EQ(rows[1][1], "");
}

TEST(Csv, Errors) {
  std::optional<std::size_t> line;
  EXPECT_EQ(code_of([] { parse_csv("a,b\n1,2\n3\n", 2); }, &line), ErrorCode::kParseError);
  EXPECT_EQ(line, 3u);
  EXPECT_EQ(code_of([] { parse_csv("a,b\n\"open,2\n", 2); }), ErrorCode::kParseError);
  EXPECT_EQ(code_of([] { parse_csv("a,b,c\n", 2); }), ErrorCode::kConfigMismatch);
  std::vector<std::string> header{"id", "name"};
  EXPECT_EQ(code_of([&] { parse_csv("id,nam\n", header); }), ErrorCode::kConfigMismatch);
}

TEST(Csv, RowSerializationRoundTrips) {
  std::vector<std::string> cells{"plain", "a,b", "q\"q", "line\nbreak", ""};
  auto text = "h1,h2,h3,h4,h5\n" + csv_row(cells) + "\n";
  EXPECT_EQ(parse_csv(text, 5).at(0), cells);
}

TEST(NTriples, BasicLines) {
  EXPECT_TRUE(parse_ntriples("").empty());
  auto t = parse_ntriples(
      "# comment\n"
      "<http://ex/a> <http://ex/p> \"5\"^^<http://www.w3.org/2001/XMLSchema#integer> .\n"
      "\n"
      "<http://ex/a> <http://ex/q> <http://ex/b> .\n"
      "<http://ex/a> <http://ex/r> \"tab\\there \\u00e9\" .\n");
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(std::get<Literal>(t[0].object), (Literal{"5", Datatype::kInteger}));
  EXPECT_EQ(std::get<Identifier>(t[1].object).value, "http://ex/b");
  EXPECT_EQ(std::get<Literal>(t[2].object).lexical, "tab\there \xC3\xA9");
}

TEST(NTriples, BlankNodesAreSkolemizedPerDataset) {
  auto t = parse_ntriples("_:b1 <http://ex/p> _:b2 .\n", "people");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].subject, Identifier::opaque("_:people.b1"));
  EXPECT_EQ(std::get<Identifier>(t[0].object), Identifier::opaque("_:people.b2"));
}

TEST(NTriples, Rejections) {
  std::optional<std::size_t> line;
  EXPECT_EQ(code_of([] { parse_ntriples("<http://a> <http://p> \"x\"@en .\n"); }, &line),
            ErrorCode::kUnsupportedConstruct);
  EXPECT_EQ(line, 1u);
  EXPECT_EQ(code_of([] { parse_ntriples("<http://a> <http://p> <http://o> <http://g> .\n"); }),
            ErrorCode::kUnsupportedConstruct);
  EXPECT_EQ(code_of([] { parse_ntriples("\n<http://a> <http://p> <http://o>\n"); }, &line), ErrorCode::kParseError);
  EXPECT_EQ(line, 2u);
  EXPECT_EQ(code_of([] { parse_ntriples("<http://a> \"p\" <http://o> .\n"); }), ErrorCode::kParseError);
  EXPECT_EQ(code_of([] { parse_ntriples("<http://a> <http://p> \"x\"^^<http://www.w3.org/2001/XMLSchema#gYear> .\n"); }),
            ErrorCode::kUnsupportedConstruct);
}

TEST(Config, StrictJson) {
  auto cfg = parse_relational_config(kEmployeesConfig);
  EXPECT_EQ(cfg.table_name, "employees");
  EXPECT_EQ(parse_relational_config(to_json(cfg)), cfg);
  EXPECT_EQ(code_of([] { parse_relational_config(R"({"table_name":"t","columns":[],"primary_key":[],"x":1})"); }),
            ErrorCode::kConfigMismatch);
  EXPECT_EQ(code_of([] {
              parse_relational_config(
                  R"({"table_name":"t","columns":[{"name":"a","datatype":"integer"}],"primary_key":["b"]})");
            }),
            ErrorCode::kValidationError);
  auto cube = parse_cube_config(kCubeConfig);
  EXPECT_EQ(parse_cube_config(to_json(cube)), cube);
  EXPECT_EQ(code_of([] {
              parse_cube_config(R"({"columns":[{"name":"y","role":"dimension","datatype":"integer"}]})");
            }),
            ErrorCode::kValidationError);
}

TEST(MapRelational, EmployeesExample) {
  auto cfg = parse_relational_config(kEmployeesConfig);
  std::vector<CsvRow> rows{{"1", "Ann"}, {"2", "Bo"}};
  auto m = map_relational(rows, cfg, "employees");
  EXPECT_EQ(m.schema.count(SchemaKind::kClass), 1u);
  EXPECT_EQ(m.schema.count(SchemaKind::kProperty), 2u);
  const SchemaObject* name_prop = m.schema.find(column_property_id("employees", "employees", "name"));
  ASSERT_NE(name_prop, nullptr);
  EXPECT_EQ(name_prop->domain_class, table_class_id("employees", "employees"));
  EXPECT_EQ(name_prop->range, Range(Datatype::kString));

  ASSERT_EQ(m.records.size(), 2u);
  for (const auto& [subject, rec] : m.records.records()) EXPECT_EQ(rec.attributes.size(), 3u);
  const Record* r1 = m.records.find(Identifier::uri("evoarch:ds/employees/rec/1"));
  ASSERT_NE(r1, nullptr);
  EXPECT_TRUE(r1->attributes.contains(
      RecordAttribute{Identifier::uri(std::string(kRdfType)), table_class_id("employees", "employees")}));
}

TEST(MapRelational, NullsEmptyAndErrors) {
  auto cfg = parse_relational_config(kEmployeesConfig);
  auto empty = map_relational({}, cfg, "employees");
  EXPECT_EQ(empty.schema.size(), 3u);
  EXPECT_EQ(empty.records.size(), 0u);

  std::vector<CsvRow> with_null{{"1", ""}};
  EXPECT_EQ(map_relational(with_null, cfg, "employees").records.attribute_count(), 2u);

  std::vector<CsvRow> dup{{"1", "Ann"}, {"01", "Bo"}};
  EXPECT_EQ(code_of([&] { map_relational(dup, cfg, "employees"); }), ErrorCode::kDuplicateKey);
  std::vector<CsvRow> bad{{"x", "Ann"}};
  EXPECT_EQ(code_of([&] { map_relational(bad, cfg, "employees"); }), ErrorCode::kValueSyntaxError);
  std::vector<CsvRow> null_pk{{"", "Ann"}};
  EXPECT_EQ(code_of([&] { map_relational(null_pk, cfg, "employees"); }), ErrorCode::kValueSyntaxError);
}

TEST(MapRelational, CompositeKeySubject) {
  auto cfg = parse_relational_config(R"({"table_name":"sales",
    "columns":[{"name":"id","datatype":"integer"},{"name":"region","datatype":"string"},{"name":"qty","datatype":"integer"}],
    "primary_key":["id","region"]})");
  std::vector<CsvRow> rows{{"7", "EU", "3"}};
  auto m = map_relational(rows, cfg, "employees");
  EXPECT_NE(m.records.find(Identifier::uri("evoarch:ds/employees/rec/7%7CEU")), nullptr);
}

TEST(MapCube, PopulationExample) {
  auto cfg = parse_cube_config(kCubeConfig);
  std::vector<CsvRow> rows{{"2010", "EU", "500"}};
  auto m = map_multidimensional(rows, cfg, "eu-population");
  EXPECT_EQ(m.schema.count(SchemaKind::kClass), 1u);
  EXPECT_EQ(m.schema.count(SchemaKind::kProperty), 3u);
  ASSERT_EQ(m.records.size(), 1u);
  const Record& rec = m.records.records().begin()->second;
  EXPECT_EQ(rec.subject.value, "evoarch:ds/eu-population/rec/obs/2010%7CEU");
  EXPECT_EQ(rec.attributes.size(), 4u);

  std::vector<CsvRow> dup{{"2010", "EU", "500"}, {"2010", "EU", "501"}};
  EXPECT_EQ(code_of([&] { map_multidimensional(dup, cfg, "p"); }), ErrorCode::kDuplicateKey);
  auto empty = map_multidimensional({}, cfg, "p");
  EXPECT_EQ(empty.schema.size(), 4u);
  EXPECT_EQ(empty.records.size(), 0u);
}

TEST(MapRdf, GroupsBySubject) {
  auto t = parse_ntriples(
      "<http://ex/a> <http://ex/p> \"1\" .\n"
      "<http://ex/a> <http://ex/q> <http://ex/b> .\n"
      "<http://ex/a> <http://ex/q> <http://ex/c> .\n"
      "<http://ex/b> <http://ex/p> \"2\" .\n"
      "<http://ex/b> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://ex/Thing> .\n"
      "<http://ex/b> <http://ex/p> \"2\" .\n");
  auto m = map_rdf(t, "ex");
  EXPECT_EQ(m.records.size(), 2u);
  EXPECT_EQ(m.records.attribute_count(), 5u);
  EXPECT_NE(m.schema.find(Identifier::uri("http://ex/Thing")), nullptr);
  const SchemaObject* p = m.schema.find(Identifier::uri("http://ex/p"));
  ASSERT_NE(p, nullptr);
  EXPECT_EQ(p->kind, SchemaKind::kProperty);
  EXPECT_EQ(p->range, Range(Identifier::uri(std::string(kRdfsResource))));

  auto empty = map_rdf({}, "ex");
  EXPECT_EQ(empty.schema.size(), 0u);
  EXPECT_EQ(empty.records.size(), 0u);
}

TEST(MapRdf, DomainAndRangeAssertions) {
  auto t = parse_ntriples(
      "<http://ex/age> <http://www.w3.org/2000/01/rdf-schema#domain> <http://ex/Person> .\n"
      "<http://ex/age> <http://www.w3.org/2000/01/rdf-schema#range> "
      "<http://www.w3.org/2001/XMLSchema#integer> .\n"
      "<http://ex/knows> <http://www.w3.org/2000/01/rdf-schema#range> <http://ex/Person> .\n"
      "<http://ex/al> <http://ex/age> \"30\"^^<http://www.w3.org/2001/XMLSchema#integer> .\n"
      "<http://ex/al> <http://ex/knows> <http://ex/bo> .\n");
  auto m = map_rdf(t, "ex");
  const SchemaObject* age = m.schema.find(Identifier::uri("http://ex/age"));
  ASSERT_NE(age, nullptr);
  EXPECT_EQ(age->domain_class, Identifier::uri("http://ex/Person"));
  EXPECT_EQ(age->range, Range(Datatype::kInteger));
  const SchemaObject* knows = m.schema.find(Identifier::uri("http://ex/knows"));
  ASSERT_NE(knows, nullptr);
  EXPECT_EQ(knows->range, Range(Identifier::uri("http://ex/Person")));
}

TEST(Export, RelationalSortedByKey) {
  auto cfg = parse_relational_config(kEmployeesConfig);
  std::vector<CsvRow> rows{{"10", "Cy"}, {"2", "Bo"}, {"1", "Ann"}, {"3", ""}};
  auto m = map_relational(rows, cfg, "employees");
  EXPECT_EQ(export_relational_csv(m.records, cfg, "employees"), "id,name\n1,Ann\n2,Bo\n3,\n10,Cy\n");
  EXPECT_EQ(export_relational_csv(RecordSet(), cfg, "employees"), "id,name\n");
}

TEST(Export, RoundTripsForEveryModel) {
  auto cfg = parse_relational_config(kEmployeesConfig);
  std::string csv = "id,name\n2,\"B, o\"\n1,Ann\n";
  auto rel = map_source(SourceModel::kRelational, csv, kEmployeesConfig, "employees");
  auto rel2 = map_source(SourceModel::kRelational, export_relational_csv(rel.records, cfg, "employees"),
                         kEmployeesConfig, "employees");
  EXPECT_EQ(rel.records.content_hash(), rel2.records.content_hash());

  std::string cube_csv = "year,region,pop\n2011,EU,510\n2010,EU,500\n2010,US,300\n";
  auto cube = map_source(SourceModel::kMultidimensional, cube_csv, kCubeConfig, "pop");
  auto cube2 = map_source(SourceModel::kMultidimensional,
                          export_cube_csv(cube.records, parse_cube_config(kCubeConfig), "pop"), kCubeConfig, "pop");
  EXPECT_EQ(cube.records.content_hash(), cube2.records.content_hash());

  std::string nt = "_:x <http://ex/p> \"a\\nb\" .\n<http://ex/a> <http://ex/q> _:x .\n";
  auto rdf = map_source(SourceModel::kRdf, nt, "", "ex");
  std::string exported = export_ntriples(rdf.records, "ex");
  auto rdf2 = map_source(SourceModel::kRdf, exported, "", "ex");
  EXPECT_EQ(rdf.records.content_hash(), rdf2.records.content_hash());
  EXPECT_NE(exported.find("_:x "), std::string::npos);
}

}  // namespace
}  // namespace evoarch
