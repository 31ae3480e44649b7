#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "plaque/dyadic.hpp"
#include "plaque/entropy_matrix.hpp"
#include "plaque/errors.hpp"
#include "plaque/fd.hpp"
#include "plaque/parallel.hpp"
#include "plaque/reductions.hpp"
#include "plaque/relation.hpp"

namespace plaque {

// Size caps for the exponential engines. Defaults keep the worst case around
// 1e8 indicator evaluations.
struct ExactLimits {
  std::size_t max_finite_k_cells = 20;
  std::size_t max_naive_cells = 25;
  std::size_t max_witnesses = 20;
};

struct FiniteKConfig {
  std::uint64_t k = 16;
};

// Cells that, when all present, force a violation once the focus cell holds a
// fresh value: (j, lhs...), (j', lhs...), (j', rhs). Sorted.
struct WitnessSet {
  std::vector<Position> cells;

  auto operator<=>(const WitnessSet&) const = default;
};

namespace detail {

inline void require_position(const Instance& instance, Position p) {
  if (!instance.valid(p)) throw AddressError("position outside instance");
}

// Pairwise check of (I_{Q<-X})_{p<-v} ⊨ F on a substituted cell array, where
// masked cells carry values no real cell can equal.
inline bool satisfies_substituted(const std::vector<std::uint64_t>& cells, const std::vector<bool>& masked,
                                  std::size_t rows, std::size_t arity, const FdSet& fds) {
  for (const auto& fd : fds) {
    for (std::size_t j1 = 0; j1 < rows; ++j1) {
      if (masked[j1 * arity + fd.rhs]) continue;
      for (std::size_t j2 = j1 + 1; j2 < rows; ++j2) {
        if (masked[j2 * arity + fd.rhs]) continue;
        bool same = std::all_of(fd.lhs.begin(), fd.lhs.end(),
                                [&](std::size_t a) { return cells[j1 * arity + a] == cells[j2 * arity + a]; });
        if (same && cells[j1 * arity + fd.rhs] != cells[j2 * arity + fd.rhs]) return false;
      }
    }
  }
  return true;
}

// Compiled form of check_masked_satisfaction for one focus cell and one
// inserted value: every statically violating (FD, row pair) becomes a bitmask
// of cells that must all be present for the violation to materialize.
class CompiledMaskCheck {
 public:
  CompiledMaskCheck(const Instance& instance, Position p, ValueId v, const FdSet& fds) {
    const std::size_t arity = instance.arity();
    auto value = [&](std::size_t r, std::size_t a) -> ValueId {
      return (r == p.row && a == p.attribute) ? v : instance.at(r, a);
    };
    const std::size_t focus = instance.cell_index(p);
    for (const auto& fd : fds) {
      for (std::size_t j1 = 0; j1 < instance.rows(); ++j1) {
        for (std::size_t j2 = j1 + 1; j2 < instance.rows(); ++j2) {
          bool same = std::all_of(fd.lhs.begin(), fd.lhs.end(),
                                  [&](std::size_t a) { return value(j1, a) == value(j2, a); });
          if (!same || value(j1, fd.rhs) == value(j2, fd.rhs)) continue;
          std::uint64_t pattern = 0;
          for (std::size_t a : fd.lhs) pattern |= bit(j1 * arity + a) | bit(j2 * arity + a);
          pattern |= bit(j1 * arity + fd.rhs) | bit(j2 * arity + fd.rhs);
          pattern &= ~bit(focus);
          patterns_.push_back(pattern);
        }
      }
    }
    std::sort(patterns_.begin(), patterns_.end());
    patterns_.erase(std::unique(patterns_.begin(), patterns_.end()), patterns_.end());
  }

  // `masked` is a bitmask over cell indices; the focus bit must be clear.
  bool satisfied(std::uint64_t masked) const noexcept {
    for (std::uint64_t pattern : patterns_)
      if ((pattern & masked) == 0) return false;
    return true;
  }

 private:
  static std::uint64_t bit(std::size_t cell) { return std::uint64_t{1} << cell; }
  std::vector<std::uint64_t> patterns_;
};

// Expands a subset index over Pos \ {p} into a mask over all cells.
inline std::uint64_t spread_around(std::uint64_t subset, std::size_t focus) {
  const std::uint64_t low = (std::uint64_t{1} << focus) - 1;
  return (subset & low) | ((subset & ~low) << 1);
}

inline std::vector<WitnessSet> witnesses_unchecked(const Instance& instance, Position p, const FdSet& fds) {
  std::vector<WitnessSet> out;
  for (const auto& fd : fds) {
    if (fd.rhs != p.attribute || fd.trivial()) continue;
    for (std::size_t other = 0; other < instance.rows(); ++other) {
      if (other == p.row) continue;
      bool same = std::all_of(fd.lhs.begin(), fd.lhs.end(),
                              [&](std::size_t a) { return instance.at(other, a) == instance.at(p.row, a); });
      if (!same) continue;
      WitnessSet w;
      for (std::size_t a : fd.lhs) {
        w.cells.push_back({p.row, a});
        w.cells.push_back({other, a});
      }
      w.cells.push_back({other, fd.rhs});
      std::sort(w.cells.begin(), w.cells.end());
      w.cells.erase(std::unique(w.cells.begin(), w.cells.end()), w.cells.end());
      out.push_back(std::move(w));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Drops witnesses that contain another witness; the union event is unchanged.
inline std::vector<WitnessSet> minimal_witnesses(std::vector<WitnessSet> witnesses) {
  std::sort(witnesses.begin(), witnesses.end(),
            [](const WitnessSet& a, const WitnessSet& b) {
              return a.cells.size() != b.cells.size() ? a.cells.size() < b.cells.size() : a < b;
            });
  std::vector<WitnessSet> kept;
  for (auto& w : witnesses) {
    bool dominated = std::any_of(kept.begin(), kept.end(), [&](const WitnessSet& k) {
      return std::includes(w.cells.begin(), w.cells.end(), k.cells.begin(), k.cells.end());
    });
    if (!dominated) kept.push_back(std::move(w));
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

// Witnesses as bitsets over a compact index of the cells they mention.
struct WitnessBits {
  std::vector<Position> cells;                   // local index -> position
  std::vector<std::vector<std::uint64_t>> sets;  // one bitset per witness
  std::size_t words = 0;
};

inline WitnessBits to_bits(const std::vector<WitnessSet>& witnesses) {
  WitnessBits out;
  for (const auto& w : witnesses) out.cells.insert(out.cells.end(), w.cells.begin(), w.cells.end());
  std::sort(out.cells.begin(), out.cells.end());
  out.cells.erase(std::unique(out.cells.begin(), out.cells.end()), out.cells.end());
  out.words = (out.cells.size() + 63) / 64;
  for (const auto& w : witnesses) {
    std::vector<std::uint64_t> bits(out.words, 0);
    for (Position c : w.cells) {
      auto i = static_cast<std::size_t>(std::lower_bound(out.cells.begin(), out.cells.end(), c) - out.cells.begin());
      bits[i / 64] |= std::uint64_t{1} << (i % 64);
    }
    out.sets.push_back(std::move(bits));
  }
  return out;
}

inline DyadicValue naive_unchecked(const Instance& instance, Position p, const FdSet& fds, const ExactLimits& limits,
                                   const Deadline& deadline) {
  const std::size_t n = instance.positions();
  if (n > limits.max_naive_cells || n > 63)
    throw SizeCapError("naive exact engine limited to " + std::to_string(limits.max_naive_cells) + " cells, instance has " +
                       std::to_string(n) + "; use witness or Monte Carlo mode");
  CompiledMaskCheck check(instance, p, fresh_value(instance, p.attribute), fds);
  const std::size_t focus = instance.cell_index(p);
  const std::uint64_t subsets = std::uint64_t{1} << (n - 1);
  std::uint64_t count = 0;
  for (std::uint64_t q = 0; q < subsets; ++q) {
    if ((q & 0xffff) == 0) deadline.check();
    if (check.satisfied(spread_around(q, focus))) ++count;
  }
  return DyadicValue(count, n - 1);
}

inline DyadicValue witness_unchecked(const Instance& instance, Position p, const FdSet& fds, const ExactLimits& limits,
                                     const Deadline& deadline) {
  auto witnesses = minimal_witnesses(witnesses_unchecked(instance, p, fds));
  if (witnesses.empty()) return DyadicValue::one();
  if (witnesses.size() > limits.max_witnesses)
    throw SizeCapError("inclusion-exclusion limited to " + std::to_string(limits.max_witnesses) + " witnesses, cell has " +
                       std::to_string(witnesses.size()) + "; use Monte Carlo mode");
  auto bits = to_bits(witnesses);
  const std::size_t universe = bits.cells.size();

  // signed_counts[s] = Σ over non-empty T with |∪T| = s of (-1)^{|T|+1}
  std::vector<std::int64_t> signed_counts(universe + 1, 0);
  std::vector<std::vector<std::uint64_t>> unions(witnesses.size() + 1, std::vector<std::uint64_t>(bits.words, 0));
  std::uint64_t visited = 0;

  auto recurse = [&](auto&& self, std::size_t start, std::size_t depth) -> void {
    for (std::size_t i = start; i < bits.sets.size(); ++i) {
      auto& next = unions[depth + 1];
      std::size_t size = 0;
      for (std::size_t w = 0; w < bits.words; ++w) {
        next[w] = unions[depth][w] | bits.sets[i][w];
        size += static_cast<std::size_t>(std::popcount(next[w]));
      }
      signed_counts[size] += (depth % 2 == 0) ? 1 : -1;
      if ((++visited & 0xffff) == 0) deadline.check();
      self(self, i + 1, depth + 1);
    }
  };
  recurse(recurse, 0, 0);

  // 1 - Σ c_s 2^{-s} = (2^U - Σ c_s 2^{U-s}) / 2^U
  BigInt numerator = BigInt(1) << universe;
  for (std::size_t s = 0; s <= universe; ++s)
    if (signed_counts[s] != 0) numerator -= BigInt(signed_counts[s]) << (universe - s);
  return DyadicValue(numerator, universe);
}

}  // namespace detail

// Definitional conditional entropy H(A^k | B) in bits:
// (1 / 2^{#Pos-1}) Σ_Q log2 #V_Q.
inline double conditional_entropy_finite_k(const Instance& instance, Position p, const FdSet& fds,
                                           const FiniteKConfig& cfg, const ExactLimits& limits = {},
                                           const Deadline& deadline = {}) {
  detail::require_position(instance, p);
  require_satisfied(instance, fds);
  const std::size_t n = instance.positions();
  if (n > limits.max_finite_k_cells || n > 63)
    throw SizeCapError("finite-k entropy limited to " + std::to_string(limits.max_finite_k_cells) +
                       " cells; use Monte Carlo mode");
  if (cfg.k < fresh_value(instance, p.attribute))
    throw ValidationError("k must be at least the column maximum + 1 (" +
                          std::to_string(fresh_value(instance, p.attribute)) + ")");

  const std::size_t arity = instance.arity();
  const std::size_t focus = instance.cell_index(p);
  // Variables: ids above every k.
  const std::uint64_t variable_base = std::uint64_t{1} << 40;

  std::vector<std::uint64_t> cells(n);
  std::vector<bool> masked(n);
  const std::uint64_t subsets = std::uint64_t{1} << (n - 1);
  double total = 0.0;
  for (std::uint64_t q = 0; q < subsets; ++q) {
    if ((q & 0xff) == 0) deadline.check();
    const std::uint64_t mask = detail::spread_around(q, focus);
    for (std::size_t c = 0; c < n; ++c) {
      masked[c] = (mask >> c) & 1U;
      cells[c] = masked[c] ? variable_base + c : instance.at(c / arity, c % arity);
    }
    std::uint64_t admissible = 0;
    for (std::uint64_t v = 1; v <= cfg.k; ++v) {
      cells[focus] = v;
      if (detail::satisfies_substituted(cells, masked, instance.rows(), arity, fds)) ++admissible;
    }
    if (admissible == 0) throw PreconditionError("no admissible value; instance must satisfy F");
    total += std::log2(static_cast<double>(admissible));
  }
  return total / static_cast<double>(subsets);
}

// #{Q ⊆ Pos \ {p} : (I_{Q<-X})_{p<-fresh} ⊨ F} / 2^{#Pos-1}, by enumeration.
inline DyadicValue exact_entropy_naive(const Instance& instance, Position p, const FdSet& fds,
                                       const ExactLimits& limits = {}, const Deadline& deadline = {}) {
  detail::require_position(instance, p);
  require_satisfied(instance, fds);
  return detail::naive_unchecked(instance, p, fds, limits, deadline);
}

// One witness per (same-RHS FD, partner row with equal LHS); duplicates removed.
inline std::vector<WitnessSet> enumerate_witnesses(const Instance& instance, Position p, const FdSet& fds) {
  detail::require_position(instance, p);
  require_satisfied(instance, fds);
  return detail::witnesses_unchecked(instance, p, fds);
}

// 1 - Pr_Q[some witness fully present], by inclusion-exclusion over witnesses.
inline DyadicValue exact_entropy_witness(const Instance& instance, Position p, const FdSet& fds,
                                         const ExactLimits& limits = {}, const Deadline& deadline = {}) {
  detail::require_position(instance, p);
  require_satisfied(instance, fds);
  return detail::witness_unchecked(instance, p, fds, limits, deadline);
}

enum class ExactStrategy { naive, witness };

struct ExactOptions {
  ExactStrategy strategy = ExactStrategy::witness;
  bool reductions = true;  // false reproduces the unoptimized baseline
  ExactLimits limits;
  unsigned threads = 1;
  Deadline deadline;
};

inline EntropyMatrix entropy_matrix_exact(const Instance& instance, const FdSet& fds, const ExactOptions& options = {}) {
  require_satisfied(instance, fds);
  auto matrix = EntropyMatrix::for_instance(instance);
  matrix.info().mode = options.strategy == ExactStrategy::naive ? "exact-naive" : "exact-witness";
  if (!options.reductions) matrix.info().mode += "-unoptimized";

  auto compute = [&](const Instance& inst, const FdSet& f, Position p) {
    return options.strategy == ExactStrategy::naive
               ? detail::naive_unchecked(inst, p, f, options.limits, options.deadline)
               : detail::witness_unchecked(inst, p, f, options.limits, options.deadline);
  };
  auto store = [&](Position original, DyadicValue value) {
    auto& cell = matrix.at(original);
    cell.value = value.to_double();
    cell.dyadic = std::move(value);
    cell.method = Method::exact;
    cell.preset = false;
  };

  if (!options.reductions) {
    if (options.strategy == ExactStrategy::naive && instance.positions() > options.limits.max_naive_cells)
      throw SizeCapError("instance has " + std::to_string(instance.positions()) + " cells, naive cap is " +
                         std::to_string(options.limits.max_naive_cells) + "; use witness or Monte Carlo mode");
    std::vector<DyadicValue> results(instance.positions());
    parallel_for(instance.positions(), options.threads,
                 [&](std::size_t c) { results[c] = compute(instance, fds, instance.position_of(c)); });
    for (std::size_t c = 0; c < results.size(); ++c) store(instance.position_of(c), std::move(results[c]));
    return matrix;
  }

  auto sub = build_subtable(instance, fds);
  if (options.strategy == ExactStrategy::naive && !sub.to_compute.empty() &&
      sub.instance.positions() > options.limits.max_naive_cells)
    throw SizeCapError("reduced instance has " + std::to_string(sub.instance.positions()) + " cells, naive cap is " +
                       std::to_string(options.limits.max_naive_cells) + "; use witness or Monte Carlo mode");
  std::vector<DyadicValue> results(sub.to_compute.size());
  parallel_for(sub.to_compute.size(), options.threads,
               [&](std::size_t i) { results[i] = compute(sub.instance, sub.fds, sub.to_compute[i]); });
  for (std::size_t i = 0; i < results.size(); ++i)
    store(sub.plan.to_original(sub.to_compute[i]), std::move(results[i]));
  return matrix;
}

}  // namespace plaque
