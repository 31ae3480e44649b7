#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "plaque/dyadic.hpp"
#include "plaque/relation.hpp"

namespace plaque {

enum class Method { exact, mc };

inline const char* to_string(Method m) { return m == Method::exact ? "exact" : "mc"; }

struct CellEntropy {
  double value = 1.0;
  Method method = Method::exact;
  std::optional<DyadicValue> dyadic;  // exact cells only
  std::uint64_t successes = 0;         // mc cells only
  std::uint64_t iterations = 0;        // mc cells only
  bool preset = false;                 // set to 1 by the uniqueness shortcut
};

// Run-level provenance carried into exports.
struct RunInfo {
  std::string mode;  // exact-naive, exact-witness, mc, ...
  std::optional<std::uint64_t> seed;
  std::optional<double> epsilon;
  std::optional<double> delta;
  std::optional<std::uint64_t> iterations;
  std::uint64_t samples_drawn = 0;
  std::string data_digest;
  std::string fd_digest;
};

// Per-position entropies with the shape of the original instance.
class EntropyMatrix {
 public:
  EntropyMatrix() = default;
  EntropyMatrix(Schema schema, std::vector<std::size_t> row_ids)
      : schema_(std::move(schema)), row_ids_(std::move(row_ids)), cells_(row_ids_.size() * schema_.size()) {
    for (auto& c : cells_) {
      c.dyadic = DyadicValue::one();
      c.preset = true;
    }
  }

  static EntropyMatrix for_instance(const Instance& instance) {
    return EntropyMatrix(instance.schema(), instance.row_ids());
  }

  const Schema& schema() const noexcept { return schema_; }
  const std::vector<std::size_t>& row_ids() const noexcept { return row_ids_; }
  std::size_t rows() const noexcept { return row_ids_.size(); }
  std::size_t cols() const noexcept { return schema_.size(); }
  std::size_t size() const noexcept { return cells_.size(); }

  CellEntropy& at(Position p) { return cells_.at(p.row * cols() + p.attribute); }
  const CellEntropy& at(Position p) const { return cells_.at(p.row * cols() + p.attribute); }
  double value(std::size_t row, std::size_t attribute) const { return at({row, attribute}).value; }

  const std::vector<CellEntropy>& cells() const noexcept { return cells_; }

  // Smallest entropy in the matrix; 1 for an empty matrix.
  double min_value() const {
    double m = 1.0;
    for (const auto& c : cells_) m = std::min(m, c.value);
    return m;
  }

  RunInfo& info() noexcept { return info_; }
  const RunInfo& info() const noexcept { return info_; }

 private:
  Schema schema_;
  std::vector<std::size_t> row_ids_;
  std::vector<CellEntropy> cells_;
  RunInfo info_;
};

}  // namespace plaque
