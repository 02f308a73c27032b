#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kHousing = std::string(RANKDB_DATA_DIR) + "/housing";

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = rankdb::cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

bool has(const std::string& text, const std::string& piece) { return text.find(piece) != std::string::npos; }

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("rankdb_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                         "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }
  std::string str() const { return path_.string(); }

 private:
  fs::path path_;
};

}  // namespace

TEST(Cli, EvalPrintsCsv) {
  Outcome r = run({"eval", "join(houses, offers)", "--catalog", kHousing});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "#,agent:str,bdrm:int,id:int,price:int,sqft:int");
  EXPECT_TRUE(has(r.out, "0.937,Adams,3,71,849000,3280\n0.937,Black,3,71,798000,3280\n"));
}

TEST(Cli, EvalExactRoundTrips) {
  TempDir dir;
  Outcome r = run({"eval", "restrict(houses, roomy)", "--catalog", kHousing, "--exact"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ofstream(dir / "roomy.csv") << r.out;
  Outcome again = run({"eval", "roomy", "--catalog", dir.str(), "--exact"});
  ASSERT_EQ(again.code, 0) << again.err;
  EXPECT_EQ(again.out, r.out);
}

TEST(Cli, EquivReportsNeitherWithEvidence) {
  TempDir dir;
  std::ofstream(dir / "join.csv") << run({"eval", "join(houses, offers)", "--catalog", kHousing, "--exact"}).out;
  Outcome r = run({"equiv", dir / "join.csv", kHousing + "/listings.csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(has(r.out, "NEITHER")) << r.out;
  EXPECT_TRUE(has(r.out, "798000")) << r.out;
  EXPECT_TRUE(has(r.out, "note:")) << r.out;

  Outcome inc = run({"equiv", kHousing + "/listings.csv", dir / "join.csv"});
  EXPECT_TRUE(has(inc.out, "INCLUDED")) << inc.out;
  EXPECT_TRUE(has(inc.out, "map: piecewise{")) << inc.out;
}

TEST(Cli, EquivReportsEquivalence) {
  std::string fixtures = std::string(RANKDB_DATA_DIR) + "/fixtures";
  Outcome r = run({"equiv", fixtures + "/same_order_high.csv", fixtures + "/same_order_low.csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(has(r.out, "EQUIVALENT")) << r.out;
  EXPECT_TRUE(has(r.out, "isomorphism: graph{")) << r.out;
}

TEST(Cli, TransformThenEval) {
  TempDir dir;
  Outcome t = run({"transform", "--map", "f", "--catalog", kHousing, "--out", dir / "moved"});
  ASSERT_EQ(t.code, 0) << t.err;
  EXPECT_TRUE(fs::exists(dir / "moved/catalog.conf"));
  Outcome r = run({"eval", "project(restrict(join(houses, offers), roomy), [id, price])", "--catalog", dir / "moved"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(has(r.out, "0.580,71,798000\n0.580,71,849000\n")) << r.out;

  Outcome printed = run({"transform", "--map", "f", "houses", "--catalog", kHousing});
  EXPECT_TRUE(has(printed.out, "# houses\n")) << printed.out;
  EXPECT_TRUE(has(printed.out, "0.272,2,93,1130\n")) << printed.out;
  EXPECT_EQ(run({"transform", "--map", "nope", "--catalog", kHousing}).code, 1);
}

TEST(Cli, TopK) {
  Outcome r = run({"topk", "2", "join(houses, offers)", "--catalog", kHousing});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(has(r.out, "0.937,Adams,3,71,849000,3280\n0.937,Black,3,71,798000,3280\n")) << r.out;
  EXPECT_TRUE(has(r.out, "sorted accesses: ")) << r.out;
  EXPECT_TRUE(has(r.out, "random accesses: ")) << r.out;

  Outcome blocked = run({"topk", "2", "join(union(houses, houses), offers)", "--catalog", kHousing});
  EXPECT_EQ(blocked.code, 1);
  EXPECT_TRUE(has(blocked.err, "union")) << blocked.err;
  EXPECT_NE(run({"topk", "0", "houses", "--catalog", kHousing}).code, 0);
}

TEST(Cli, Plan) {
  Outcome r = run({"plan", "semijoin(houses, offers)", "--catalog", kHousing});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(has(r.out, "before:\nsemijoin\n")) << r.out;
  EXPECT_TRUE(has(r.out, "rules: semijoin")) << r.out;
}

TEST(Cli, Calc) {
  Outcome r = run({"calc", "exists a, p. offers(a, i, p)", "--catalog", kHousing});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(has(r.out, "#,i:str\n0.997,71\n")) << r.out;
}

TEST(Cli, Verify) {
  Outcome r = run({"verify"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_FALSE(has(r.out, "FAIL")) << r.out;
  EXPECT_TRUE(has(r.out, "checks passed")) << r.out;
}

TEST(Cli, Errors) {
  Outcome bad = run({"eval", "join(houses", "--catalog", kHousing});
  EXPECT_EQ(bad.code, 1);
  EXPECT_TRUE(has(bad.err, "error: ")) << bad.err;
  EXPECT_TRUE(has(bad.err, "line 1")) << bad.err;

  EXPECT_EQ(run({"eval", "nowhere", "--catalog", kHousing}).code, 1);
  EXPECT_NE(run({}).code, 0);
  EXPECT_NE(run({"frobnicate"}).code, 0);
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"equiv", "/no/such.csv", "/no/other.csv"}).code, 1);
}
