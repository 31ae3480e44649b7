#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "plaque/errors.hpp"
#include "plaque/relation.hpp"

namespace plaque {

// lhs -> rhs over attribute indices of one schema. lhs is kept sorted and unique.
struct FunctionalDependency {
  std::vector<std::size_t> lhs;
  std::size_t rhs = 0;

  FunctionalDependency() = default;
  FunctionalDependency(std::vector<std::size_t> lhs_attributes, std::size_t rhs_attribute)
      : lhs(std::move(lhs_attributes)), rhs(rhs_attribute) {
    if (lhs.empty()) throw SchemaError("functional dependency needs a non-empty left-hand side");
    std::sort(lhs.begin(), lhs.end());
    lhs.erase(std::unique(lhs.begin(), lhs.end()), lhs.end());
  }

  // rhs ∈ lhs: can never be violated.
  bool trivial() const noexcept { return std::binary_search(lhs.begin(), lhs.end(), rhs); }

  auto operator<=>(const FunctionalDependency&) const = default;
};

class FdSet {
 public:
  FdSet() = default;
  explicit FdSet(std::vector<FunctionalDependency> fds) : fds_(std::move(fds)) {
    std::sort(fds_.begin(), fds_.end());
    fds_.erase(std::unique(fds_.begin(), fds_.end()), fds_.end());
  }

  auto begin() const noexcept { return fds_.begin(); }
  auto end() const noexcept { return fds_.end(); }
  std::size_t size() const noexcept { return fds_.size(); }
  bool empty() const noexcept { return fds_.empty(); }
  const FunctionalDependency& operator[](std::size_t i) const { return fds_[i]; }
  const std::vector<FunctionalDependency>& list() const noexcept { return fds_; }

  // Throws SchemaError when an FD names an attribute the schema does not have.
  void validate(const Schema& schema) const {
    for (const auto& fd : fds_) {
      if (fd.rhs >= schema.size()) throw SchemaError("functional dependency references unknown attribute");
      for (std::size_t a : fd.lhs)
        if (a >= schema.size()) throw SchemaError("functional dependency references unknown attribute");
    }
  }

  bool operator==(const FdSet&) const = default;

 private:
  std::vector<FunctionalDependency> fds_;
};

inline std::string format_fd(const Schema& schema, const FunctionalDependency& fd) {
  std::string out;
  for (std::size_t i = 0; i < fd.lhs.size(); ++i) {
    if (i) out += ", ";
    out += schema.name(fd.lhs[i]);
  }
  return out + " -> " + schema.name(fd.rhs);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::vector<std::size_t> parse_attribute_list(std::string_view list, const Schema& schema, std::size_t line) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    auto comma = list.find(',', start);
    auto token = trim(list.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (token.empty()) {
      if (comma == std::string_view::npos && out.empty() && trim(list).empty()) break;
      throw FdParseError("empty attribute name", line);
    }
    auto index = schema.index_of(token);
    if (!index) throw FdParseError("unknown attribute '" + std::string(token) + "'", line);
    out.push_back(*index);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace detail

// One FD per line: "A1, A2 -> B[, C]". '#' starts a comment. Multi-attribute
// right-hand sides are split into one FD per attribute.
inline FdSet parse_fds(std::string_view text, const Schema& schema) {
  std::vector<FunctionalDependency> fds;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    ++line_no;
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;

    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    std::size_t arrow_len = 2;
    auto arrow = line.find("->");
    if (arrow == std::string_view::npos) {
      arrow = line.find("\xE2\x86\x92");  // U+2192
      arrow_len = 3;
    }
    if (arrow == std::string_view::npos) throw FdParseError("missing '->'", line_no);

    auto lhs = detail::parse_attribute_list(line.substr(0, arrow), schema, line_no);
    auto rhs = detail::parse_attribute_list(line.substr(arrow + arrow_len), schema, line_no);
    if (lhs.empty()) throw FdParseError("empty left-hand side", line_no);
    if (rhs.empty()) throw FdParseError("empty right-hand side", line_no);
    for (std::size_t b : rhs) fds.emplace_back(lhs, b);
  }
  return FdSet(std::move(fds));
}

inline std::string format_fds(const Schema& schema, const FdSet& fds) {
  std::string out;
  for (const auto& fd : fds) out += format_fd(schema, fd) + "\n";
  return out;
}

struct Violation {
  std::size_t fd = 0;  // index into the FdSet
  std::size_t first_row = 0;
  std::size_t second_row = 0;
};

namespace detail {

struct ProjectionHash {
  std::size_t operator()(const std::vector<std::uint64_t>& key) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto v : key) {
      h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

// Generic FD check over a cell accessor. `cell(row, attr)` yields a 64-bit
// value; `skip_rhs(row)` / `skip_lhs(row)` exclude rows whose RHS or LHS
// contains a variable.
template <class Cell, class SkipRhs, class SkipLhs>
std::optional<Violation> first_violation(std::size_t rows, const FdSet& fds, Cell&& cell, SkipRhs&& skip_rhs,
                                         SkipLhs&& skip_lhs) {
  for (std::size_t f = 0; f < fds.size(); ++f) {
    const auto& fd = fds[f];
    std::unordered_map<std::vector<std::uint64_t>, std::pair<std::uint64_t, std::size_t>, ProjectionHash> groups;
    groups.reserve(rows);
    std::vector<std::uint64_t> key(fd.lhs.size());
    for (std::size_t r = 0; r < rows; ++r) {
      if (skip_rhs(r, fd.rhs) || skip_lhs(r, fd.lhs)) continue;
      for (std::size_t i = 0; i < fd.lhs.size(); ++i) key[i] = cell(r, fd.lhs[i]);
      std::uint64_t rhs = cell(r, fd.rhs);
      auto [it, inserted] = groups.try_emplace(key, rhs, r);
      if (!inserted && it->second.first != rhs) return Violation{f, it->second.second, r};
    }
  }
  return std::nullopt;
}

}  // namespace detail

// First violating (FD, row pair), or nullopt when I ⊨ F.
inline std::optional<Violation> check_satisfaction(const Instance& instance, const FdSet& fds) {
  fds.validate(instance.schema());
  return detail::first_violation(
      instance.rows(), fds, [&](std::size_t r, std::size_t a) -> std::uint64_t { return instance.at(r, a); },
      [](std::size_t, std::size_t) { return false; },
      [](std::size_t, const std::vector<std::size_t>&) { return false; });
}

inline std::string describe_violation(const Instance& instance, const FdSet& fds, const Violation& v) {
  std::ostringstream out;
  out << "instance violates " << format_fd(instance.schema(), fds[v.fd]) << " on rows "
      << instance.row_id(v.first_row) << " and " << instance.row_id(v.second_row);
  return out.str();
}

// Throws PreconditionError unless I ⊨ F.
inline void require_satisfied(const Instance& instance, const FdSet& fds) {
  if (auto v = check_satisfaction(instance, fds)) throw PreconditionError(describe_violation(instance, fds, *v));
}

// (I_{Q<-X})_{p<-v} ⊨ F. Masked cells are distinct variables: an FD only
// constrains row pairs whose RHS cells are both unmasked, and an LHS that
// contains a variable matches no other row.
inline bool check_masked_satisfaction(const Instance& instance, const Mask& mask, Position p, ValueId v,
                                      const FdSet& fds) {
  const std::size_t focus = instance.cell_index(p);
  if (mask.contains(focus)) throw ValidationError("focus position must not be masked");
  auto masked = [&](std::size_t r, std::size_t a) { return mask.contains(r * instance.arity() + a); };
  auto cell = [&](std::size_t r, std::size_t a) -> std::uint64_t {
    return (r == p.row && a == p.attribute) ? v : instance.at(r, a);
  };
  auto skip_rhs = [&](std::size_t r, std::size_t b) { return masked(r, b); };
  auto skip_lhs = [&](std::size_t r, const std::vector<std::size_t>& lhs) {
    return std::any_of(lhs.begin(), lhs.end(), [&](std::size_t a) { return masked(r, a); });
  };
  return !detail::first_violation(instance.rows(), fds, cell, skip_rhs, skip_lhs).has_value();
}

// No other row shares p's LHS projection under any FD whose RHS is p's
// attribute. Trivial FDs (rhs ∈ lhs) cannot be violated and are ignored.
inline bool is_unique(const Instance& instance, Position p, const FdSet& fds) {
  for (const auto& fd : fds) {
    if (fd.rhs != p.attribute || fd.trivial()) continue;
    for (std::size_t r = 0; r < instance.rows(); ++r) {
      if (r == p.row) continue;
      bool same = std::all_of(fd.lhs.begin(), fd.lhs.end(),
                              [&](std::size_t a) { return instance.at(r, a) == instance.at(p.row, a); });
      if (same) return false;
    }
  }
  return true;
}

}  // namespace plaque
