#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace plaque::cli;

  CLI::App app{"plaque: per-cell information content of relational data under functional dependencies"};
  app.require_subcommand(1);

  RunConfig run;
  std::string delimiter = ",";
  bool no_header = false;
  auto add_common = [&](CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--seed", cfg.seed, "RNG seed for Monte Carlo sampling")->envname("PLAQUE_SEED");
    cmd->add_option("--delimiter", delimiter, "CSV field delimiter");
    cmd->add_flag("--no-header", no_header, "CSV has no header line");
    cmd->add_option("--max-exact-cells", cfg.limits.max_naive_cells, "cell cap for the naive exact engine");
    cmd->add_option("--max-witnesses", cfg.limits.max_witnesses, "witness cap for the inclusion-exclusion engine");
    cmd->add_option("--threads", cfg.threads, "worker threads (0 = all cores)");
  };

  auto* profile = app.add_subcommand("profile", "compute the entropy matrix and write reports");
  profile->add_option("--data", run.data_path, "input CSV")->required();
  profile->add_option("--fds", run.fd_path, "functional dependencies, one per line")->required();
  profile->add_option("--mode", run.mode, "exact-naive | exact-witness | mc | auto")
      ->check(CLI::IsMember({"exact-naive", "exact-witness", "mc", "auto"}));
  profile->add_option("--epsilon", run.epsilon, "Monte Carlo accuracy");
  profile->add_option("--delta", run.delta, "Monte Carlo failure probability");
  profile->add_option("--iterations", run.iterations, "explicit sample count (overrides the planner)");
  profile->add_option("--limit-rows", run.limit_rows, "use only the first N rows");
  profile->add_option("--out-html", run.out_html, "heatmap HTML");
  profile->add_option("--out-csv", run.out_csv, "entropy matrix CSV");
  profile->add_option("--out-json", run.out_json, "entropy matrix JSON with provenance");
  profile->add_option("--out-hist", run.out_hist, "histogram CSV");
  profile->add_option("--manifest", run.out_manifest, "run manifest JSON");
  profile->add_option("--bins", run.bins, "histogram bins")->check(CLI::PositiveNumber);
  profile->add_option("--timeout-secs", run.timeout_secs, "abort after this many seconds (0 = never)");
  add_common(profile, run);

  double epsilon = 0.01, delta = 0.01;
  bool sweep = false;
  auto* plan = app.add_subcommand("plan", "iterations needed for accuracy epsilon at confidence 1 - delta");
  plan->add_option("--epsilon", epsilon, "accuracy");
  plan->add_option("--delta", delta, "failure probability");
  plan->add_flag("--sweep", sweep, "emit an (epsilon, delta, iterations) grid as CSV");

  BenchConfig bench;
  bench.rows = {1, 2, 3};
  bench.modes = {"unoptimized", "optimized"};
  bench.iterations = {10'000, 100'000};
  auto* bench_cmd = app.add_subcommand("bench", "runtime grid over row counts and modes");
  bench_cmd->add_option("--data", bench.base.data_path, "input CSV (default: synthetic satellite-like table)");
  bench_cmd->add_option("--fds", bench.base.fd_path, "functional dependencies");
  bench_cmd->add_option("--synthetic-seed", bench.synthetic_seed, "seed of the synthetic table");
  bench_cmd->add_option("--rows", bench.rows, "row grid, e.g. 1,2,3")->delimiter(',');
  bench_cmd->add_option("--modes", bench.modes, "unoptimized, optimized, witness, mc")->delimiter(',');
  bench_cmd->add_option("--iterations", bench.iterations, "Monte Carlo iteration grid")->delimiter(',');
  bench_cmd->add_option("--timeout-secs", bench.timeout_secs, "per-measurement timeout");
  bench_cmd->add_option("--out", bench.out_path, "output CSV (default stdout)");
  add_common(bench_cmd, bench.base);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  auto apply_csv_flags = [&](RunConfig& cfg) {
    if (delimiter.size() != 1) {
      std::cerr << "error: --delimiter must be a single character\n";
      return false;
    }
    cfg.delimiter = delimiter[0];
    cfg.header = !no_header;
    return true;
  };

  if (*profile) {
    if (!apply_csv_flags(run)) return kInputError;
    return cmd_profile(run, std::cout, std::cerr);
  }
  if (*plan) return cmd_plan(epsilon, delta, sweep, std::cout, std::cerr);
  if (*bench_cmd) {
    if (!apply_csv_flags(bench.base)) return kInputError;
    if (bench.base.data_path.empty() != bench.base.fd_path.empty()) {
      std::cerr << "error: --data and --fds go together\n";
      return kInputError;
    }
    return cmd_bench(bench, std::cout, std::cerr);
  }
  return kInputError;
}
