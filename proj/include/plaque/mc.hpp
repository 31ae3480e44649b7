#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "plaque/entropy_matrix.hpp"
#include "plaque/errors.hpp"
#include "plaque/exact.hpp"
#include "plaque/fd.hpp"
#include "plaque/parallel.hpp"
#include "plaque/reductions.hpp"
#include "plaque/relation.hpp"

namespace plaque {

// Monte Carlo sample budget. `from_bound` is false for explicit iteration counts.
struct McPlan {
  double epsilon = 0.0;
  double delta = 0.0;
  std::uint64_t iterations = 0;
  bool from_bound = false;

  static McPlan fixed(std::uint64_t iterations) {
    if (iterations == 0) throw ValidationError("iteration count must be positive");
    return McPlan{0.0, 0.0, iterations, false};
  }
};

// Hoeffding: Pr(|X - INF| >= eps) <= delta once n >= 2 ln(2/delta) / eps^2.
inline McPlan plan_iterations(double epsilon, double delta) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ValidationError("epsilon must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
  const double bound = 2.0 * std::log(2.0 / delta) / (epsilon * epsilon);
  return McPlan{epsilon, delta, static_cast<std::uint64_t>(std::ceil(bound)), true};
}

// Accuracy guaranteed by `iterations` samples at confidence 1 - delta.
inline double hoeffding_epsilon(std::uint64_t iterations, double delta) {
  return std::sqrt(2.0 * std::log(2.0 / delta) / static_cast<double>(iterations));
}

struct McEstimate {
  double value = 1.0;
  std::uint64_t successes = 0;
  std::uint64_t iterations = 0;
  std::uint64_t seed = 0;
  std::optional<double> epsilon;
  std::optional<double> delta;
};

enum class IndicatorPath {
  witness,     // sample only the cells of the focus cell's witnesses
  full_check,  // sample all of Pos \ {p} and run the masked FD check
};

struct McOptions {
  unsigned threads = 1;
  IndicatorPath path = IndicatorPath::witness;
  std::uint64_t chunk = 16384;  // samples per keyed substream
  Deadline deadline;
};

// Substream for one (seed, row id, attribute, chunk). Independent of schedule.
inline std::mt19937_64 keyed_stream(std::uint64_t seed, std::uint64_t row_id, std::uint64_t attribute,
                                    std::uint64_t chunk) {
  auto lo = [](std::uint64_t x) { return static_cast<std::uint32_t>(x); };
  auto hi = [](std::uint64_t x) { return static_cast<std::uint32_t>(x >> 32); };
  std::seed_seq seq{lo(seed), hi(seed), lo(row_id), hi(row_id), lo(attribute), hi(attribute), lo(chunk), hi(chunk)};
  return std::mt19937_64(seq);
}

// Draws Q uniformly from the subsets of Pos \ {p} (one fair coin per cell) and
// returns 1 iff (I_{Q<-X})_{p<-fresh} ⊨ F.
template <class Rng>
int sample_indicator(const Instance& instance, Position p, const FdSet& fds, Rng& rng) {
  const std::size_t focus = instance.cell_index(p);
  Mask mask(instance.positions());
  std::uint64_t word = 0;
  std::size_t used = 64;
  for (std::size_t c = 0; c < instance.positions(); ++c) {
    if (c == focus) continue;
    if (used == 64) {
      word = rng();
      used = 0;
    }
    if ((word >> used++) & 1U) mask.set(c);
  }
  return check_masked_satisfaction(instance, mask, p, fresh_value(instance, p.attribute), fds) ? 1 : 0;
}

namespace detail {

// Per-cell sampler; prepared once, then run over independent chunks.
class CellSampler {
 public:
  CellSampler(const Instance& instance, Position p, const FdSet& fds, IndicatorPath path)
      : instance_(&instance), fds_(&fds), p_(p), path_(path) {
    if (path_ == IndicatorPath::witness) bits_ = to_bits(minimal_witnesses(witnesses_unchecked(instance, p, fds)));
  }

  bool trivially_one() const { return path_ == IndicatorPath::witness && bits_.sets.empty(); }

  std::uint64_t run(std::mt19937_64& rng, std::uint64_t samples, const Deadline& deadline) const {
    std::uint64_t successes = 0;
    if (path_ == IndicatorPath::full_check) {
      for (std::uint64_t s = 0; s < samples; ++s) {
        if ((s & 0xff) == 0) deadline.check();
        successes += static_cast<std::uint64_t>(sample_indicator(*instance_, p_, *fds_, rng));
      }
      return successes;
    }
    if (bits_.sets.empty()) return samples;
    if (bits_.words == 1) {
      std::vector<std::uint64_t> sets;
      for (const auto& s : bits_.sets) sets.push_back(s[0]);
      for (std::uint64_t s = 0; s < samples; ++s) {
        if ((s & 0xffff) == 0) deadline.check();
        const std::uint64_t masked = rng();
        bool violated = false;
        for (std::uint64_t w : sets)
          if ((w & masked) == 0) {
            violated = true;
            break;
          }
        successes += violated ? 0 : 1;
      }
      return successes;
    }
    std::vector<std::uint64_t> masked(bits_.words);
    for (std::uint64_t s = 0; s < samples; ++s) {
      if ((s & 0xffff) == 0) deadline.check();
      for (auto& m : masked) m = rng();
      bool violated = false;
      for (const auto& set : bits_.sets) {
        bool present = true;
        for (std::size_t w = 0; w < bits_.words && present; ++w) present = (set[w] & masked[w]) == 0;
        if (present) {
          violated = true;
          break;
        }
      }
      successes += violated ? 0 : 1;
    }
    return successes;
  }

 private:
  const Instance* instance_;
  const FdSet* fds_;
  Position p_;
  IndicatorPath path_;
  WitnessBits bits_;
};

struct CellTask {
  std::size_t cell;
  std::uint64_t chunk;
  std::uint64_t samples;
};

inline std::vector<CellTask> chunk_tasks(std::size_t cells, std::uint64_t iterations, std::uint64_t chunk) {
  std::vector<CellTask> tasks;
  for (std::size_t c = 0; c < cells; ++c)
    for (std::uint64_t start = 0, k = 0; start < iterations; start += chunk, ++k)
      tasks.push_back({c, k, std::min(chunk, iterations - start)});
  return tasks;
}

// Estimates several cells of one instance. Keys are (row id, attribute index
// of the original instance) so that reduced and full runs share substreams.
inline std::vector<std::uint64_t> estimate_cells(const Instance& instance, const FdSet& fds,
                                                 const std::vector<Position>& cells,
                                                 const std::vector<std::size_t>& key_attributes, const McPlan& plan,
                                                 std::uint64_t seed, const McOptions& options) {
  if (plan.iterations == 0) throw ValidationError("plan has zero iterations");
  if (options.chunk == 0) throw ValidationError("chunk size must be positive");
  std::vector<CellSampler> samplers;
  samplers.reserve(cells.size());
  for (Position p : cells) samplers.emplace_back(instance, p, fds, options.path);

  auto tasks = chunk_tasks(cells.size(), plan.iterations, options.chunk);
  std::vector<std::uint64_t> partial(tasks.size(), 0);
  parallel_for(tasks.size(), options.threads, [&](std::size_t t) {
    const auto& task = tasks[t];
    const auto& sampler = samplers[task.cell];
    if (sampler.trivially_one()) {
      partial[t] = task.samples;
      return;
    }
    auto rng = keyed_stream(seed, instance.row_id(cells[task.cell].row), key_attributes[task.cell], task.chunk);
    partial[t] = sampler.run(rng, task.samples, options.deadline);
  });

  std::vector<std::uint64_t> successes(cells.size(), 0);
  for (std::size_t t = 0; t < tasks.size(); ++t) successes[tasks[t].cell] += partial[t];
  return successes;
}

inline McEstimate make_estimate(std::uint64_t successes, const McPlan& plan, std::uint64_t seed) {
  McEstimate e;
  e.successes = successes;
  e.iterations = plan.iterations;
  e.value = static_cast<double>(successes) / static_cast<double>(plan.iterations);
  e.seed = seed;
  if (plan.from_bound) {
    e.epsilon = plan.epsilon;
    e.delta = plan.delta;
  }
  return e;
}

}  // namespace detail

// Mean of plan.iterations indicator samples at p.
inline McEstimate estimate_entropy(const Instance& instance, Position p, const FdSet& fds, const McPlan& plan,
                                   std::uint64_t seed, const McOptions& options = {}) {
  if (!instance.valid(p)) throw AddressError("position outside instance");
  require_satisfied(instance, fds);
  auto successes = detail::estimate_cells(instance, fds, {p}, {p.attribute}, plan, seed, options);
  return detail::make_estimate(successes[0], plan, seed);
}

// Reduces the instance, then estimates every non-unique cell on the subtable.
inline EntropyMatrix entropy_matrix_mc(const Instance& instance, const FdSet& fds, const McPlan& plan,
                                       std::uint64_t seed, const McOptions& options = {}) {
  require_satisfied(instance, fds);
  auto matrix = EntropyMatrix::for_instance(instance);
  auto& info = matrix.info();
  info.mode = "mc";
  info.seed = seed;
  info.iterations = plan.iterations;
  if (plan.from_bound) {
    info.epsilon = plan.epsilon;
    info.delta = plan.delta;
  }

  auto sub = build_subtable(instance, fds);
  if (sub.to_compute.empty()) return matrix;

  std::vector<std::size_t> key_attributes;
  for (Position p : sub.to_compute) key_attributes.push_back(sub.plan.to_original(p).attribute);
  auto successes = detail::estimate_cells(sub.instance, sub.fds, sub.to_compute, key_attributes, plan, seed, options);

  for (std::size_t i = 0; i < sub.to_compute.size(); ++i) {
    auto& cell = matrix.at(sub.plan.to_original(sub.to_compute[i]));
    cell.method = Method::mc;
    cell.preset = false;
    cell.dyadic.reset();
    cell.successes = successes[i];
    cell.iterations = plan.iterations;
    cell.value = static_cast<double>(successes[i]) / static_cast<double>(plan.iterations);
  }
  info.samples_drawn = static_cast<std::uint64_t>(sub.to_compute.size()) * plan.iterations;
  return matrix;
}

}  // namespace plaque
