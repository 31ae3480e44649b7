#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "plaque/errors.hpp"

namespace plaque {

// Dictionary-encoded cell value. Valid ids start at 1.
using ValueId = std::uint32_t;

class Schema {
 public:
  Schema() = default;

  explicit Schema(std::vector<std::string> attributes) : attributes_(std::move(attributes)) {
    std::unordered_set<std::string> seen;
    for (const auto& name : attributes_) {
      if (name.empty()) throw SchemaError("attribute names must be non-empty");
      if (!seen.insert(name).second) throw SchemaError("duplicate attribute name '" + name + "'");
    }
  }

  std::size_t size() const noexcept { return attributes_.size(); }
  const std::string& name(std::size_t attribute) const { return attributes_.at(attribute); }
  const std::vector<std::string>& attributes() const noexcept { return attributes_; }

  std::optional<std::size_t> index_of(std::string_view name) const {
    auto it = std::find(attributes_.begin(), attributes_.end(), name);
    if (it == attributes_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - attributes_.begin());
  }

  bool operator==(const Schema&) const = default;

 private:
  std::vector<std::string> attributes_;
};

// A single cell: `row` is the 0-based ordinal inside the instance, not the
// original row id (see Instance::row_id).
struct Position {
  std::size_t row = 0;
  std::size_t attribute = 0;

  auto operator<=>(const Position&) const = default;
};

// Per-attribute bidirectional map between raw strings and value ids.
class Dictionary {
 public:
  ValueId encode(const std::string& raw) {
    auto [it, inserted] = ids_.try_emplace(raw, static_cast<ValueId>(values_.size() + 1));
    if (inserted) values_.push_back(raw);
    return it->second;
  }

  // Registers `raw` under an explicit id (used when building from integer ids).
  void assign(ValueId id, std::string raw) {
    if (values_.size() < id) values_.resize(id);
    values_[id - 1] = raw;
    ids_.emplace(std::move(raw), id);
  }

  const std::string& decode(ValueId id) const {
    if (id == 0 || id > values_.size()) throw AddressError("value id " + std::to_string(id) + " not in dictionary");
    return values_[id - 1];
  }

  std::optional<ValueId> find(const std::string& raw) const {
    auto it = ids_.find(raw);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t size() const noexcept { return values_.size(); }

 private:
  std::vector<std::string> values_;
  std::unordered_map<std::string, ValueId> ids_;
};

// Ordered relational instance with duplicate tuples allowed. Immutable once
// built; cells are stored row-major.
class Instance {
 public:
  Instance() = default;

  Instance(Schema schema, std::vector<ValueId> cells, std::vector<Dictionary> dictionaries,
           std::vector<std::size_t> row_ids)
      : schema_(std::move(schema)),
        cells_(std::move(cells)),
        dictionaries_(std::move(dictionaries)),
        row_ids_(std::move(row_ids)) {
    if (dictionaries_.size() != schema_.size()) throw SchemaError("one dictionary per attribute required");
    if (schema_.size() == 0 ? !cells_.empty() : cells_.size() != row_ids_.size() * schema_.size())
      throw SchemaError("cell count does not match rows x attributes");
    for (ValueId v : cells_)
      if (v == 0) throw SchemaError("value ids must be >= 1");
  }

  // Builds an instance straight from value ids; each id decodes to its decimal string.
  static Instance from_values(Schema schema, const std::vector<std::vector<ValueId>>& rows) {
    std::vector<ValueId> cells;
    std::vector<Dictionary> dicts(schema.size());
    std::vector<std::size_t> row_ids;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != schema.size()) throw SchemaError("row " + std::to_string(r + 1) + " has wrong arity");
      for (std::size_t a = 0; a < rows[r].size(); ++a) {
        ValueId v = rows[r][a];
        if (v == 0) throw SchemaError("value ids must be >= 1");
        if (dicts[a].size() < v || dicts[a].decode(v).empty()) dicts[a].assign(v, std::to_string(v));
        cells.push_back(v);
      }
      row_ids.push_back(r + 1);
    }
    return Instance(std::move(schema), std::move(cells), std::move(dicts), std::move(row_ids));
  }

  const Schema& schema() const noexcept { return schema_; }
  std::size_t rows() const noexcept { return row_ids_.size(); }
  std::size_t arity() const noexcept { return schema_.size(); }
  std::size_t positions() const noexcept { return rows() * arity(); }

  // Original 1-based row number of ordinal `row` (an element of Def(I)).
  std::size_t row_id(std::size_t row) const { return row_ids_.at(row); }
  const std::vector<std::size_t>& row_ids() const noexcept { return row_ids_; }

  ValueId at(std::size_t row, std::size_t attribute) const noexcept { return cells_[row * arity() + attribute]; }

  std::size_t cell_index(Position p) const noexcept { return p.row * arity() + p.attribute; }
  Position position_of(std::size_t cell) const noexcept { return {cell / arity(), cell % arity()}; }

  bool valid(Position p) const noexcept { return p.row < rows() && p.attribute < arity(); }

  const Dictionary& dictionary(std::size_t attribute) const { return dictionaries_.at(attribute); }
  const std::string& text(Position p) const { return dictionaries_.at(p.attribute).decode(at(p.row, p.attribute)); }

  // Position addressed by original row id and attribute name.
  Position position(std::size_t row_id, std::string_view attribute) const {
    auto a = schema_.index_of(attribute);
    if (!a) throw AddressError("unknown attribute '" + std::string(attribute) + "'");
    auto it = std::find(row_ids_.begin(), row_ids_.end(), row_id);
    if (it == row_ids_.end()) throw AddressError("row " + std::to_string(row_id) + " not defined");
    return {static_cast<std::size_t>(it - row_ids_.begin()), *a};
  }

  // Sub-instance I(J, K): rows and attributes given as ordinals, in the given order.
  Instance subinstance(const std::vector<std::size_t>& rows, const std::vector<std::size_t>& attributes) const {
    std::vector<std::string> names;
    std::vector<Dictionary> dicts;
    for (std::size_t a : attributes) {
      names.push_back(schema_.name(a));
      dicts.push_back(dictionaries_.at(a));
    }
    std::vector<ValueId> cells;
    std::vector<std::size_t> ids;
    cells.reserve(rows.size() * attributes.size());
    for (std::size_t r : rows) {
      for (std::size_t a : attributes) cells.push_back(at(r, a));
      ids.push_back(row_ids_.at(r));
    }
    return Instance(Schema(std::move(names)), std::move(cells), std::move(dicts), std::move(ids));
  }

 private:
  Schema schema_;
  std::vector<ValueId> cells_;
  std::vector<Dictionary> dictionaries_;
  std::vector<std::size_t> row_ids_;
};

// Returns t_j[A_k].
inline ValueId value_at(const Instance& instance, Position p) {
  if (!instance.valid(p))
    throw AddressError("position (" + std::to_string(p.row) + ", " + std::to_string(p.attribute) +
                       ") outside instance");
  return instance.at(p.row, p.attribute);
}

// A value id absent from the column: column max + 1.
inline ValueId fresh_value(const Instance& instance, std::size_t attribute) {
  if (attribute >= instance.arity()) throw AddressError("attribute index out of range");
  ValueId max = 0;
  for (std::size_t r = 0; r < instance.rows(); ++r) max = std::max(max, instance.at(r, attribute));
  return max + 1;
}

// Positions Q replaced by pairwise-distinct variables. The focus position is
// never part of the mask.
class Mask {
 public:
  Mask() = default;
  explicit Mask(std::size_t cells) : masked_(cells, false) {}

  static Mask of(const Instance& instance, const std::vector<Position>& positions) {
    Mask m(instance.positions());
    for (Position p : positions) m.set(instance.cell_index(p));
    return m;
  }

  void set(std::size_t cell, bool value = true) { masked_.at(cell) = value; }
  bool contains(std::size_t cell) const noexcept { return cell < masked_.size() && masked_[cell]; }
  std::size_t size() const noexcept { return masked_.size(); }

 private:
  std::vector<bool> masked_;
};

struct CsvOptions {
  char delimiter = ',';
  bool header = true;
  std::optional<std::size_t> row_limit;
};

namespace detail {

// RFC-4180 record reader. Tracks the physical line a record starts on.
class CsvReader {
 public:
  CsvReader(std::string_view text, char delimiter) : text_(text), delimiter_(delimiter) {}

  bool next(std::vector<std::string>& fields, std::size_t& start_line) {
    fields.clear();
    if (pos_ >= text_.size()) return false;
    start_line = line_;
    std::string field;
    bool quoted = false;
    bool field_started_quoted = false;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (quoted) {
        if (c == '"') {
          if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '"') {
            field.push_back('"');
            pos_ += 2;
            continue;
          }
          quoted = false;
          ++pos_;
          continue;
        }
        if (c == '\n') ++line_;
        field.push_back(c);
        ++pos_;
        continue;
      }
      if (c == '"' && field.empty() && !field_started_quoted) {
        quoted = true;
        field_started_quoted = true;
        ++pos_;
        continue;
      }
      if (c == delimiter_) {
        fields.push_back(std::move(field));
        field.clear();
        field_started_quoted = false;
        ++pos_;
        continue;
      }
      if (c == '\r' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '\n') {
        ++pos_;
        continue;
      }
      if (c == '\n') {
        ++pos_;
        ++line_;
        fields.push_back(std::move(field));
        return true;
      }
      field.push_back(c);
      ++pos_;
    }
    if (quoted) throw IngestError("unterminated quoted field", start_line);
    fields.push_back(std::move(field));
    return true;
  }

 private:
  std::string_view text_;
  char delimiter_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

inline bool needs_quotes(const std::string& s, char delimiter) {
  return s.find_first_of(std::string{delimiter, '"', '\n', '\r'}) != std::string::npos;
}

}  // namespace detail

inline void write_csv_field(std::ostream& out, const std::string& s, char delimiter = ',') {
  if (!detail::needs_quotes(s, delimiter)) {
    out << s;
    return;
  }
  out << '"';
  for (char c : s) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

inline Instance ingest_csv(std::string_view text, const CsvOptions& options = {}) {
  detail::CsvReader reader(text, options.delimiter);
  std::vector<std::string> fields;
  std::size_t line = 0;

  std::optional<Schema> schema;
  if (options.header) {
    if (!reader.next(fields, line)) return Instance(Schema{}, {}, {}, {});
    schema.emplace(fields);
  }

  std::vector<Dictionary> dicts;
  std::vector<ValueId> cells;
  std::vector<std::size_t> row_ids;
  if (schema) dicts.resize(schema->size());

  while (reader.next(fields, line)) {
    if (options.row_limit && row_ids.size() >= *options.row_limit) break;
    if (!schema) {
      std::vector<std::string> names;
      for (std::size_t i = 0; i < fields.size(); ++i) names.push_back("A" + std::to_string(i + 1));
      schema.emplace(std::move(names));
      dicts.resize(schema->size());
    }
    if (fields.size() != schema->size())
      throw IngestError("expected " + std::to_string(schema->size()) + " fields, found " +
                            std::to_string(fields.size()),
                        line);
    for (std::size_t a = 0; a < fields.size(); ++a) cells.push_back(dicts[a].encode(fields[a]));
    row_ids.push_back(row_ids.size() + 1);
  }
  if (!schema) return Instance(Schema{}, {}, {}, {});
  return Instance(std::move(*schema), std::move(cells), std::move(dicts), std::move(row_ids));
}

inline Instance ingest_csv(std::istream& in, const CsvOptions& options = {}) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return ingest_csv(std::string_view(text), options);
}

// Re-serializes with a header line; reproduces the ingested record sequence.
inline void write_csv(std::ostream& out, const Instance& instance, char delimiter = ',') {
  const auto& attrs = instance.schema().attributes();
  for (std::size_t a = 0; a < attrs.size(); ++a) {
    if (a) out << delimiter;
    write_csv_field(out, attrs[a], delimiter);
  }
  out << '\n';
  for (std::size_t r = 0; r < instance.rows(); ++r) {
    for (std::size_t a = 0; a < instance.arity(); ++a) {
      if (a) out << delimiter;
      write_csv_field(out, instance.text({r, a}), delimiter);
    }
    out << '\n';
  }
}

}  // namespace plaque
