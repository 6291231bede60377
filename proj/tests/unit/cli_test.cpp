#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "evoarch/archive.hpp"
#include "evoarch/cli.hpp"
#include "test_support.hpp"

namespace evoarch {
namespace {

using testing::TempDir;

const std::filesystem::path kData = EVOARCH_TEST_DATA;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    ar_ = (dir_.path() / "ar").string();
    ASSERT_EQ(run({"init", ar_}).code, 0);
  }

  Result ingest(const std::string& file, const std::string& tx) {
    return run({"ingest", "--archive", ar_, "--dataset", "employees", "--model", "relational", "--config",
                (kData / "employees.json").string(), "--tx-time", tx, "--agent", "curator",
                (kData / file).string()});
  }

  TempDir dir_;
  std::string ar_;
};

TEST_F(CliTest, LifecycleAndEmptyListing) {
  auto r = run({"list", "datasets", "--archive", ar_});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "");
  EXPECT_EQ(run({"init", ar_}).code, 1);
}

TEST_F(CliTest, IngestDiffShowExport) {
  auto r1 = ingest("employees_v1.csv", "2015-05-01T00:00:00Z");
  EXPECT_EQ(r1.code, 0) << r1.err;
  EXPECT_EQ(r1.out, "v0001\n");
  EXPECT_EQ(ingest("employees_v2.csv", "2016-05-01T00:00:00Z").out, "v0002\n");

  auto d = run({"diff", "employees", "v0001", "v0002", "--high-level", "--archive", ar_});
  EXPECT_EQ(d.code, 0) << d.err;
  auto hl = d.out.find("==HL==\n");
  ASSERT_NE(hl, std::string::npos);
  EXPECT_NE(d.out.find("value-update\t", hl), std::string::npos);

  auto plain = run({"diff", "employees", "v0001", "v0002", "--archive", ar_});
  EXPECT_TRUE(plain.out.ends_with("==HL==\n"));

  auto typed = run({"diff", "employees", "v0001", "v0002", "--type", "add-record", "--archive", ar_});
  EXPECT_EQ(typed.out.find("delete-"), std::string::npos);
  EXPECT_NE(typed.out.find("add-record"), std::string::npos);

  auto show = run({"show", "employees", "--at", "2015-06-01T00:00:00Z", "--subjects", "evoarch:ds/employees/rec/3",
                   "--archive", ar_});
  EXPECT_EQ(show.code, 0) << show.err;
  EXPECT_EQ(std::count(show.out.begin(), show.out.end(), '\n'), 3);

  auto exp = run({"export", "employees", "--version", "v0001", "--archive", ar_});
  EXPECT_EQ(exp.out, "id,name,salary\n1,Ann,3000\n2,Bo,2800.5\n3,Cy,\n");

  auto json = run({"list", "versions", "employees", "--format", "json", "--archive", ar_});
  EXPECT_EQ(json.code, 0);
  EXPECT_NE(json.out.find("\"agent\": \"curator\""), std::string::npos);
}

TEST_F(CliTest, OutputIsDeterministic) {
  ingest("employees_v1.csv", "2015-05-01T00:00:00Z");
  ingest("employees_v2.csv", "2016-05-01T00:00:00Z");
  for (auto args : std::vector<std::vector<std::string>>{
           {"diff", "employees", "v0001", "v0002", "--high-level", "--format", "json"},
           {"query", "timeline", "employees"},
           {"query", "mixed", "--type", "value-update,add-record"},
           {"show", "employees"}}) {
    args.push_back("--archive");
    args.push_back(ar_);
    auto a = run(args), b = run(args);
    EXPECT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_FALSE(a.out.empty());
  }
}

TEST_F(CliTest, Resources) {
  ingest("employees_v1.csv", "2015-05-01T00:00:00Z");
  ingest("employees_v2.csv", "2016-05-01T00:00:00Z");
  auto def = run({"resource", "define", "--archive", ar_, "--dataset", "employees", "--name", "ann", "--subjects",
                  "evoarch:ds/employees/rec/1"});
  EXPECT_EQ(def.code, 0) << def.err;
  EXPECT_EQ(def.out, "evoarch:res/ann\n");
  auto ev = run({"resource", "eval", "ann", "--version", "v0001", "--archive", ar_});
  EXPECT_EQ(std::count(ev.out.begin(), ev.out.end(), '\n'), 4);
  auto rd = run({"resource", "diff", "ann", "v0001", "v0002", "--archive", ar_});
  EXPECT_NE(rd.out.find("value-update"), std::string::npos);
  EXPECT_NE(rd.out.find("evoarch:res/ann"), std::string::npos);
  auto again = run({"resource", "define", "--archive", ar_, "--dataset", "employees", "--name", "ann", "--subjects",
                    "evoarch:ds/employees/rec/2"});
  EXPECT_EQ(again.code, 1);
  EXPECT_TRUE(again.err.starts_with("E017: ResourceExists:")) << again.err;
}

TEST_F(CliTest, ErrorsAndUsage) {
  auto missing = run({"show", "ghost", "--archive", ar_});
  EXPECT_EQ(missing.code, 1);
  EXPECT_TRUE(missing.err.starts_with("E010: DatasetNotFound:")) << missing.err;
  EXPECT_EQ(missing.out, "");

  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"show", "employees", "--archive", ar_, "--format", "xml"}).code, 2);
  EXPECT_EQ(run({"ingest", "--archive", ar_, "--dataset", "e", "--model", "relational", "--tx-time", "yesterday",
                 "--config", (kData / "employees.json").string(), (kData / "employees_v1.csv").string()})
                .code,
            2);
  EXPECT_EQ(run({"help"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);

  ingest("employees_v1.csv", "2015-05-01T00:00:00Z");
  auto order = ingest("employees_v2.csv", "2014-05-01T00:00:00Z");
  EXPECT_EQ(order.code, 1);
  EXPECT_TRUE(order.err.starts_with("E011: TemporalOrderViolation:")) << order.err;
  EXPECT_EQ(run({"list", "versions", "employees", "--archive", ar_}).out.find("v0002"), std::string::npos);
}

TEST_F(CliTest, ArchiveFromEnvironment) {
  unsetenv("EVOARCH_ROOT");
  EXPECT_EQ(run({"list", "datasets"}).code, 2);
  setenv("EVOARCH_ROOT", ar_.c_str(), 1);
  EXPECT_EQ(run({"list", "datasets"}).code, 0);
  // the flag wins over the environment
  EXPECT_EQ(run({"list", "datasets", "--archive", (dir_.path() / "nowhere").string()}).code, 1);
  unsetenv("EVOARCH_ROOT");
}

TEST(CliBinary, SmokeTest) {
  TempDir dir;
  auto ar = (dir.path() / "ar").string();
  std::string bin = EVOARCH_BINARY;
  EXPECT_EQ(std::system((bin + " init " + ar + " > /dev/null").c_str()), 0);
  EXPECT_EQ(std::system((bin + " list datasets --archive " + ar + " > /dev/null").c_str()), 0);
  int status = std::system((bin + " show ghost --archive " + ar + " 2> /dev/null").c_str());
  EXPECT_EQ(WEXITSTATUS(status), 1);
  status = std::system((bin + " --no-such-flag 2> /dev/null").c_str());
  EXPECT_EQ(WEXITSTATUS(status), 2);
}

}  // namespace
}  // namespace evoarch
