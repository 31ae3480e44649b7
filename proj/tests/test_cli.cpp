#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include <gtest/gtest.h>

#include "commands.hpp"
#include "oracle.hpp"

namespace plaque::cli {
namespace {

namespace fs = std::filesystem;

std::string data(const std::string& name) { return std::string(PLAQUE_DATA_DIR) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("plaque-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name), std::ios::binary) << text;
    return path(name);
  }

  RunConfig abcd(const std::string& mode) const {
    RunConfig c;
    c.data_path = data("abcd.csv");
    c.fd_path = data("abcd.fds");
    c.mode = mode;
    return c;
  }

  fs::path dir_;
};

TEST_F(CliTest, ProfilePrintsCsvWhenNoOutputs) {
  std::ostringstream out, err;
  EXPECT_EQ(cmd_profile(abcd("exact-naive"), out, err), kOk);
  EXPECT_EQ(out.str(), "A,B,C,D\n1,1,0.875,1\n1,1,1,1\n1,1,0.875,1\n");
  EXPECT_NE(err.str().find("2 below 1"), std::string::npos);
}

TEST_F(CliTest, ProfileWritesAllOutputs) {
  auto c = abcd("auto");
  c.out_html = path("m.html");
  c.out_csv = path("m.csv");
  c.out_json = path("m.json");
  c.out_hist = path("h.csv");
  c.out_manifest = path("run.json");
  c.bins = 8;
  std::ostringstream out, err;
  ASSERT_EQ(cmd_profile(c, out, err), kOk) << err.str();
  EXPECT_TRUE(out.str().empty());
  EXPECT_NE(slurp(c.out_html).find("<table>"), std::string::npos);
  EXPECT_NE(slurp(c.out_json).find("\"mode\": \"exact-witness\""), std::string::npos);
  EXPECT_NE(slurp(c.out_hist).find("0.875,1,12"), std::string::npos);
  const auto manifest = slurp(c.out_manifest);
  EXPECT_NE(manifest.find("\"sha256\": \"" + sha256_hex(slurp(data("abcd.csv"))) + "\""), std::string::npos);
  EXPECT_NE(manifest.find("wall_time_seconds"), std::string::npos);
}

TEST_F(CliTest, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_F(CliTest, ExitCodes) {
  std::ostringstream out, err;
  auto missing = abcd("exact-witness");
  missing.fd_path = path("nope.fds");
  EXPECT_EQ(cmd_profile(missing, out, err), kInputError);

  auto bad_fd = abcd("exact-witness");
  bad_fd.fd_path = write("bad.fds", "A -> Z\n");
  EXPECT_EQ(cmd_profile(bad_fd, out, err), kInputError);

  auto violated = abcd("exact-witness");
  violated.fd_path = write("v.fds", "C -> D\n");
  EXPECT_EQ(cmd_profile(violated, out, err), kFdViolation);

  auto capped = abcd("exact-naive");
  capped.limits.max_naive_cells = 2;  // the reduced table has 3 free cells
  EXPECT_EQ(cmd_profile(capped, out, err), kSizeCap);

  auto no_plan = abcd("mc");
  EXPECT_EQ(cmd_profile(no_plan, out, err), kInputError);

  auto half_plan = abcd("mc");
  half_plan.epsilon = 0.1;
  EXPECT_EQ(cmd_profile(half_plan, out, err), kInputError);
}

TEST_F(CliTest, AutoFallsBackToMcBeyondWitnessCap) {
  std::string csv = "A,B\n";
  for (int i = 0; i < 8; ++i) csv += "1,1\n";
  auto c = abcd("auto");
  c.data_path = write("dup.csv", csv);
  c.fd_path = write("dup.fds", "A -> B\n");
  c.limits.max_witnesses = 3;
  c.out_json = path("m.json");
  std::ostringstream out, err;
  ASSERT_EQ(cmd_profile(c, out, err), kOk) << err.str();
  EXPECT_NE(slurp(c.out_json).find("\"iterations\": 100000"), std::string::npos);
}

TEST_F(CliTest, ProfileIsDeterministicAcrossThreads) {
  auto run = [&](unsigned threads, const std::string& tag) {
    RunConfig c;
    c.data_path = data("cd.csv");
    c.fd_path = data("cd.fds");
    c.mode = "mc";
    c.iterations = 20'000;
    c.seed = 99;
    c.threads = threads;
    c.out_json = path(tag + ".json");
    c.out_csv = path(tag + ".csv");
    std::ostringstream out, err;
    EXPECT_EQ(cmd_profile(c, out, err), kOk) << err.str();
    return slurp(c.out_json) + slurp(c.out_csv);
  };
  EXPECT_EQ(run(1, "a"), run(3, "b"));
}

TEST_F(CliTest, Plan) {
  std::ostringstream out, err;
  EXPECT_EQ(cmd_plan(0.5, 0.5, false, out, err), kOk);
  EXPECT_EQ(out.str(), "12\n");
  std::ostringstream bad;
  EXPECT_EQ(cmd_plan(0.0, 0.5, false, bad, err), kInputError);
  std::ostringstream grid;
  EXPECT_EQ(cmd_plan(0, 0, true, grid, err), kOk);
  EXPECT_EQ(grid.str().rfind("epsilon,delta,iterations\n", 0), 0u);
  EXPECT_NE(grid.str().find("0.001,0.001,15201805\n"), std::string::npos);
}

TEST_F(CliTest, BenchGrid) {
  BenchConfig b;
  b.rows = {};
  b.modes = {"optimized"};
  std::ostringstream out, err;
  EXPECT_EQ(cmd_bench(b, out, err), kOk);
  EXPECT_EQ(out.str(), "rows,mode,iterations,seconds\n");

  b.rows = {1, 2};
  b.modes = {"optimized", "witness", "mc"};
  b.iterations = {1000, 2000};
  b.out_path = path("bench.csv");
  EXPECT_EQ(cmd_bench(b, out, err), kOk) << err.str();
  std::istringstream lines(slurp(b.out_path));
  std::string line;
  std::vector<std::string> keys;
  while (std::getline(lines, line)) keys.push_back(line.substr(0, line.rfind(',')));
  EXPECT_EQ(keys, (std::vector<std::string>{"rows,mode,iterations", "1,optimized,", "1,witness,", "1,mc,1000",
                                            "1,mc,2000", "2,optimized,", "2,witness,", "2,mc,1000", "2,mc,2000"}));
}

TEST_F(CliTest, BenchReportsCapAndRejectsBadInput) {
  BenchConfig b;
  b.rows = {3};
  b.modes = {"unoptimized"};
  b.base.limits.max_naive_cells = 10;
  std::ostringstream out, err;
  EXPECT_EQ(cmd_bench(b, out, err), kOk);
  EXPECT_NE(out.str().find("3,unoptimized,,cap"), std::string::npos);
  b.modes = {"bogus"};
  EXPECT_EQ(cmd_bench(b, out, err), kInputError);
}

}  // namespace
}  // namespace plaque::cli
