#include "commands.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <sstream>

#include <openssl/evp.h>

#include <json.hpp>

#include "plaque/exact.hpp"
#include "plaque/fd.hpp"
#include "plaque/mc.hpp"
#include "plaque/reductions.hpp"
#include "plaque/relation.hpp"
#include "plaque/report.hpp"
#include "plaque/synthetic.hpp"

namespace plaque::cli {

namespace {

class IoError : public Error {
 public:
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << bytes;
  if (!out) throw IoError("write failed for '" + path + "'");
}

struct ResolvedPlan {
  McPlan plan;
  bool defaulted = false;
};

ResolvedPlan resolve_plan(const RunConfig& config, bool allow_default) {
  if (config.iterations) return {McPlan::fixed(*config.iterations)};
  if (config.epsilon && config.delta) return {plan_iterations(*config.epsilon, *config.delta)};
  if (config.epsilon || config.delta) throw ValidationError("--epsilon and --delta must be given together");
  if (allow_default) return {McPlan::fixed(kAutoMcIterations), true};
  throw ValidationError("mc mode needs --iterations or both --epsilon and --delta");
}

// auto: exact-witness when every cell to compute stays within the witness cap.
bool witness_fits(const Instance& instance, const FdSet& fds, const ExactLimits& limits) {
  auto sub = build_subtable(instance, fds);
  for (Position p : sub.to_compute)
    if (detail::minimal_witnesses(detail::witnesses_unchecked(sub.instance, p, sub.fds)).size() > limits.max_witnesses)
      return false;
  return true;
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << '\n';
    return kFdViolation;
  } catch (const SizeCapError& e) {
    err << "error: " << e.what() << '\n';
    return kSizeCap;
  } catch (const TimeoutError& e) {
    err << "error: " << e.what() << '\n';
    return kTimeout;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
}

Deadline deadline_for(double seconds) {
  return seconds > 0 ? Deadline::after(std::chrono::duration<double>(seconds)) : Deadline{};
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 failed");
  std::ostringstream out;
  for (unsigned int i = 0; i < length; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return out.str();
}

int cmd_profile(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const auto started = std::chrono::steady_clock::now();
    const std::string data_bytes = read_file(config.data_path);
    const std::string fd_bytes = read_file(config.fd_path);

    CsvOptions csv;
    csv.delimiter = config.delimiter;
    csv.header = config.header;
    csv.row_limit = config.limit_rows;
    const Instance instance = ingest_csv(std::string_view(data_bytes), csv);
    const FdSet fds = parse_fds(fd_bytes, instance.schema());

    if (auto violation = check_satisfaction(instance, fds)) {
      err << "error: " << describe_violation(instance, fds, *violation) << '\n';
      return kFdViolation;
    }

    std::string mode = config.mode;
    if (mode != "auto" && mode != "exact-naive" && mode != "exact-witness" && mode != "mc")
      throw ValidationError("unknown mode '" + mode + "'");
    std::optional<ResolvedPlan> plan;
    if (mode == "mc") plan = resolve_plan(config, false);
    if (mode == "auto") {
      if (witness_fits(instance, fds, config.limits)) {
        mode = "exact-witness";
      } else {
        mode = "mc";
        plan = resolve_plan(config, true);
      }
    }

    const Deadline deadline = deadline_for(config.timeout_secs);
    EntropyMatrix matrix;
    if (mode == "mc") {
      McOptions options;
      options.threads = config.threads;
      options.deadline = deadline;
      matrix = entropy_matrix_mc(instance, fds, plan->plan, config.seed, options);
    } else {
      ExactOptions options;
      options.strategy = mode == "exact-naive" ? ExactStrategy::naive : ExactStrategy::witness;
      options.limits = config.limits;
      options.threads = config.threads;
      options.deadline = deadline;
      matrix = entropy_matrix_exact(instance, fds, options);
    }
    matrix.info().data_digest = sha256_hex(data_bytes);
    matrix.info().fd_digest = sha256_hex(fd_bytes);

    const std::string csv_export = export_matrix_csv(matrix);
    if (!config.out_html.empty()) {
      HeatmapOptions html;
      html.title = "Plaque test: " + config.data_path;
      write_file(config.out_html, render_heatmap(instance, matrix, html));
    }
    if (!config.out_csv.empty()) write_file(config.out_csv, csv_export);
    if (!config.out_json.empty()) write_file(config.out_json, export_matrix_json(matrix));
    if (!config.out_hist.empty()) write_file(config.out_hist, render_histogram(matrix, config.bins));
    if (config.out_html.empty() && config.out_csv.empty() && config.out_json.empty() && config.out_hist.empty())
      out << csv_export;

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (!config.out_manifest.empty()) {
      nlohmann::ordered_json m;
      m["tool"] = "plaque";
      m["data"] = {{"path", config.data_path}, {"sha256", matrix.info().data_digest}};
      m["fds"] = {{"path", config.fd_path}, {"sha256", matrix.info().fd_digest}, {"count", fds.size()}};
      m["requested_mode"] = config.mode;
      m["mode"] = mode;
      m["seed"] = config.seed;
      if (plan) {
        m["plan"] = {{"epsilon", plan->plan.from_bound ? nlohmann::ordered_json(plan->plan.epsilon) : nullptr},
                     {"delta", plan->plan.from_bound ? nlohmann::ordered_json(plan->plan.delta) : nullptr},
                     {"iterations", plan->plan.iterations},
                     {"defaulted", plan->defaulted}};
      } else {
        m["plan"] = nullptr;
      }
      m["limit_rows"] = config.limit_rows ? nlohmann::ordered_json(*config.limit_rows) : nullptr;
      m["rows"] = instance.rows();
      m["attributes"] = instance.arity();
      m["threads"] = config.threads;
      m["limits"] = {{"max_exact_cells", config.limits.max_naive_cells},
                     {"max_witnesses", config.limits.max_witnesses}};
      m["outputs"] = {{"html", config.out_html},
                      {"csv", config.out_csv},
                      {"json", config.out_json},
                      {"histogram", config.out_hist}};
      m["min_entropy"] = matrix.min_value();
      m["wall_time_seconds"] = wall;
      write_file(config.out_manifest, m.dump(2) + "\n");
    }

    std::size_t below_one = 0;
    for (const auto& c : matrix.cells()) below_one += c.value < 1.0 ? 1 : 0;
    err << "mode " << mode << ": " << matrix.size() << " cells, " << below_one << " below 1, min entropy "
        << format_double(matrix.min_value()) << ", " << std::fixed << std::setprecision(3) << wall << " s\n";
    return kOk;
  });
}

int cmd_plan(double epsilon, double delta, bool sweep, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    if (!sweep) {
      out << plan_iterations(epsilon, delta).iterations << '\n';
      return kOk;
    }
    static constexpr double kEpsilons[] = {0.001, 0.002, 0.005, 0.01, 0.02, 0.03, 0.04, 0.05, 0.1};
    static constexpr double kDeltas[] = {0.1, 0.05, 0.01, 0.001};
    out << "epsilon,delta,iterations\n";
    for (double d : kDeltas)
      for (double e : kEpsilons)
        out << format_double(e) << ',' << format_double(d) << ',' << plan_iterations(e, d).iterations << '\n';
    return kOk;
  });
}

int cmd_bench(const BenchConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    Instance full;
    FdSet fds;
    if (config.base.data_path.empty()) {
      std::size_t max_rows = 0;
      for (std::size_t r : config.rows) max_rows = std::max(max_rows, r);
      auto data = satellite_like(max_rows, config.synthetic_seed);
      full = std::move(data.instance);
      fds = std::move(data.fds);
    } else {
      CsvOptions csv;
      csv.delimiter = config.base.delimiter;
      csv.header = config.base.header;
      full = ingest_csv(std::string_view(read_file(config.base.data_path)), csv);
      fds = parse_fds(read_file(config.base.fd_path), full.schema());
    }
    for (const auto& mode : config.modes)
      if (mode != "unoptimized" && mode != "optimized" && mode != "witness" && mode != "mc")
        throw ValidationError("unknown bench mode '" + mode + "'");

    std::ostringstream csv;
    csv << "rows,mode,iterations,seconds\n";
    for (std::size_t rows : config.rows) {
      if (rows > full.rows()) throw ValidationError("row grid exceeds the " + std::to_string(full.rows()) + " input rows");
      std::vector<std::size_t> row_list(rows), attrs(full.arity());
      for (std::size_t i = 0; i < rows; ++i) row_list[i] = i;
      for (std::size_t a = 0; a < full.arity(); ++a) attrs[a] = a;
      const Instance instance = full.subinstance(row_list, attrs);
      require_satisfied(instance, fds);

      for (const auto& mode : config.modes) {
        std::vector<std::uint64_t> iteration_grid{0};
        if (mode == "mc") iteration_grid = config.iterations;
        for (std::uint64_t n : iteration_grid) {
          const auto start = std::chrono::steady_clock::now();
          std::string cell;
          try {
            const Deadline deadline = deadline_for(config.timeout_secs);
            if (mode == "mc") {
              McOptions options;
              options.threads = config.base.threads;
              options.deadline = deadline;
              entropy_matrix_mc(instance, fds, McPlan::fixed(n), config.base.seed, options);
            } else {
              ExactOptions options;
              options.strategy = mode == "witness" ? ExactStrategy::witness : ExactStrategy::naive;
              options.reductions = mode != "unoptimized";
              options.limits = config.base.limits;
              options.threads = config.base.threads;
              options.deadline = deadline;
              entropy_matrix_exact(instance, fds, options);
            }
            std::ostringstream s;
            s << std::fixed << std::setprecision(6)
              << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            cell = s.str();
          } catch (const TimeoutError&) {
            cell = "-";
          } catch (const SizeCapError&) {
            cell = "cap";
          }
          csv << rows << ',' << mode << ',' << (mode == "mc" ? std::to_string(n) : std::string("")) << ',' << cell
              << '\n';
          err << "rows " << rows << ' ' << mode << (mode == "mc" ? " n=" + std::to_string(n) : std::string()) << ": "
              << cell << '\n';
        }
      }
    }
    if (config.out_path.empty()) {
      out << csv.str();
    } else {
      write_file(config.out_path, csv.str());
    }
    return kOk;
  });
}

}  // namespace plaque::cli
