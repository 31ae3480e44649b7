#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "plaque/fd.hpp"
#include "plaque/relation.hpp"

namespace plaque {

namespace detail {

// non_unique[cell] is true when some non-trivial FD with rhs = attribute has a
// second row with the same LHS projection.
inline std::vector<bool> non_unique_cells(const Instance& instance, const FdSet& fds) {
  std::vector<bool> non_unique(instance.positions(), false);
  for (const auto& fd : fds) {
    if (fd.trivial()) continue;
    std::map<std::vector<ValueId>, std::vector<std::size_t>> groups;
    std::vector<ValueId> key(fd.lhs.size());
    for (std::size_t r = 0; r < instance.rows(); ++r) {
      for (std::size_t i = 0; i < fd.lhs.size(); ++i) key[i] = instance.at(r, fd.lhs[i]);
      groups[key].push_back(r);
    }
    for (const auto& [k, rows] : groups) {
      if (rows.size() < 2) continue;
      for (std::size_t r : rows) non_unique[instance.cell_index({r, fd.rhs})] = true;
    }
  }
  return non_unique;
}

}  // namespace detail

// Positions whose entropy is exactly 1 because their value is unique w.r.t. F.
inline std::vector<Position> mark_unique_ones(const Instance& instance, const FdSet& fds) {
  fds.validate(instance.schema());
  auto non_unique = detail::non_unique_cells(instance, fds);
  std::vector<Position> ones;
  for (std::size_t c = 0; c < non_unique.size(); ++c)
    if (!non_unique[c]) ones.push_back(instance.position_of(c));
  return ones;
}

// Positions that need an actual entropy computation (complement of the ones).
inline std::vector<Position> non_unique_positions(const Instance& instance, const FdSet& fds) {
  fds.validate(instance.schema());
  auto non_unique = detail::non_unique_cells(instance, fds);
  std::vector<Position> out;
  for (std::size_t c = 0; c < non_unique.size(); ++c)
    if (non_unique[c]) out.push_back(instance.position_of(c));
  return out;
}

struct ReductionPlan {
  std::vector<Position> ones_positions;       // original positions, entropy 1
  std::vector<std::size_t> kept_rows;        // J0, ordinals of the original
  std::vector<std::size_t> kept_attributes;  // K0, attribute indices of the original

  Position to_original(Position reduced) const {
    return {kept_rows.at(reduced.row), kept_attributes.at(reduced.attribute)};
  }

  std::optional<Position> to_reduced(Position original) const {
    auto r = std::lower_bound(kept_rows.begin(), kept_rows.end(), original.row);
    auto a = std::lower_bound(kept_attributes.begin(), kept_attributes.end(), original.attribute);
    if (r == kept_rows.end() || *r != original.row) return std::nullopt;
    if (a == kept_attributes.end() || *a != original.attribute) return std::nullopt;
    return Position{static_cast<std::size_t>(r - kept_rows.begin()),
                    static_cast<std::size_t>(a - kept_attributes.begin())};
  }

  std::size_t kept_cells() const noexcept { return kept_rows.size() * kept_attributes.size(); }
};

struct Subtable {
  ReductionPlan plan;
  Instance instance;  // I(J0, K0)
  FdSet fds;          // F re-indexed onto the reduced schema
  std::vector<Position> to_compute;  // reduced positions that are not unique
};

// Restricts I to the rows holding a non-unique cell (J0) and the attributes
// mentioned by any FD (K0). Entropies on the result equal the originals at
// every mapped position.
inline Subtable build_subtable(const Instance& instance, const FdSet& fds) {
  fds.validate(instance.schema());
  auto non_unique = detail::non_unique_cells(instance, fds);

  Subtable out;
  for (std::size_t c = 0; c < non_unique.size(); ++c)
    if (!non_unique[c]) out.plan.ones_positions.push_back(instance.position_of(c));

  for (std::size_t r = 0; r < instance.rows(); ++r) {
    bool keep = false;
    for (std::size_t a = 0; a < instance.arity() && !keep; ++a) keep = non_unique[instance.cell_index({r, a})];
    if (keep) out.plan.kept_rows.push_back(r);
  }

  std::vector<bool> in_fd(instance.arity(), false);
  for (const auto& fd : fds) {
    in_fd[fd.rhs] = true;
    for (std::size_t a : fd.lhs) in_fd[a] = true;
  }
  for (std::size_t a = 0; a < instance.arity(); ++a)
    if (in_fd[a]) out.plan.kept_attributes.push_back(a);

  out.instance = instance.subinstance(out.plan.kept_rows, out.plan.kept_attributes);

  std::vector<FunctionalDependency> remapped;
  std::vector<std::size_t> new_index(instance.arity(), 0);
  for (std::size_t i = 0; i < out.plan.kept_attributes.size(); ++i) new_index[out.plan.kept_attributes[i]] = i;
  for (const auto& fd : fds) {
    std::vector<std::size_t> lhs;
    for (std::size_t a : fd.lhs) lhs.push_back(new_index[a]);
    remapped.emplace_back(std::move(lhs), new_index[fd.rhs]);
  }
  out.fds = FdSet(std::move(remapped));

  for (std::size_t r = 0; r < out.instance.rows(); ++r)
    for (std::size_t a = 0; a < out.instance.arity(); ++a) {
      Position reduced{r, a};
      if (non_unique[instance.cell_index(out.plan.to_original(reduced))]) out.to_compute.push_back(reduced);
    }
  return out;
}

}  // namespace plaque
