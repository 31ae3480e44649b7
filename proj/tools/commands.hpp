#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "plaque/exact.hpp"

namespace plaque::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kInputError = 2,
  kFdViolation = 3,
  kSizeCap = 4,
  kTimeout = 5,
};

inline constexpr std::uint64_t kDefaultSeed = 20230602;
inline constexpr std::uint64_t kAutoMcIterations = 100'000;

struct RunConfig {
  std::string data_path;
  std::string fd_path;
  std::string mode = "auto";  // exact-naive | exact-witness | mc | auto
  std::optional<double> epsilon;
  std::optional<double> delta;
  std::optional<std::uint64_t> iterations;
  std::uint64_t seed = kDefaultSeed;
  std::optional<std::size_t> limit_rows;
  char delimiter = ',';
  bool header = true;
  std::string out_html;
  std::string out_csv;
  std::string out_json;
  std::string out_hist;
  std::string out_manifest;
  std::size_t bins = 10;
  ExactLimits limits;
  double timeout_secs = 0.0;  // 0 = unlimited
  unsigned threads = 1;
};

struct BenchConfig {
  RunConfig base;                  // data/fds/limits; data_path empty = synthetic
  std::uint64_t synthetic_seed = 7;
  std::vector<std::size_t> rows;   // row-grid
  std::vector<std::string> modes;  // unoptimized | optimized | witness | mc
  std::vector<std::uint64_t> iterations;
  double timeout_secs = 60.0;
  std::string out_path;  // empty = stdout
};

int cmd_profile(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_plan(double epsilon, double delta, bool sweep, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchConfig& config, std::ostream& out, std::ostream& err);

// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

}  // namespace plaque::cli
