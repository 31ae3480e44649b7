#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "plaque/entropy_matrix.hpp"
#include "plaque/errors.hpp"
#include "plaque/relation.hpp"

namespace plaque {

struct Rgb {
  std::uint8_t r = 255, g = 255, b = 255;

  bool operator==(const Rgb&) const = default;

  std::string hex() const {
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
  }

  // Relative luminance in [0, 1] (sRGB weights, no gamma).
  double lightness() const { return (0.2126 * r + 0.7152 * g + 0.0722 * b) / 255.0; }
};

// White at entropy 1, darkest blue at the dataset minimum, linear in between.
// Scales are per dataset: colors of two reports are not comparable.
class ColorScale {
 public:
  static constexpr Rgb kWhite{255, 255, 255};
  static constexpr Rgb kDarkest{8, 48, 107};

  explicit ColorScale(double min_entropy) : min_(std::clamp(min_entropy, 0.0, 1.0)) {}

  double min_entropy() const noexcept { return min_; }
  bool degenerate() const noexcept { return min_ >= 1.0; }

  Rgb color(double value) const {
    if (degenerate() || value >= 1.0) return kWhite;
    double t = std::clamp((1.0 - value) / (1.0 - min_), 0.0, 1.0);
    auto mix = [t](std::uint8_t from, std::uint8_t to) {
      return static_cast<std::uint8_t>(std::lround(from + t * (static_cast<double>(to) - from)));
    };
    return {mix(kWhite.r, kDarkest.r), mix(kWhite.g, kDarkest.g), mix(kWhite.b, kDarkest.b)};
  }

 private:
  double min_;
};

// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw ReportError("cannot format value");
  return std::string(buf, end);
}

inline double parse_double(std::string_view s) {
  double v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size()) throw ReportError("not a number: '" + std::string(s) + "'");
  return v;
}

namespace detail {

inline std::string html_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string two_decimals(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace detail

struct HeatmapOptions {
  std::string title = "Plaque test";
  std::size_t legend_steps = 6;
};

inline std::string render_heatmap(const Instance& instance, const EntropyMatrix& matrix,
                                  const HeatmapOptions& options = {}) {
  if (matrix.rows() != instance.rows() || matrix.cols() != instance.arity())
    throw ReportError("matrix is " + std::to_string(matrix.rows()) + "x" + std::to_string(matrix.cols()) +
                      " but instance is " + std::to_string(instance.rows()) + "x" + std::to_string(instance.arity()));
  const ColorScale scale(matrix.min_value());
  std::ostringstream out;
  out << "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>"
      << detail::html_escape(options.title) << "</title>\n<style>\n"
      << "body{font-family:sans-serif;margin:1.5em}\n"
      << "table{border-collapse:collapse;font-size:13px}\n"
      << "th,td{border:1px solid #ccc;padding:3px 8px;white-space:nowrap}\n"
      << "th{background:#f4f4f4}\n"
      << ".legend{margin:0 0 1em 0}\n"
      << ".swatch{display:inline-block;width:3.5em;text-align:center;padding:2px 0;border:1px solid #ccc}\n"
      << "</style>\n</head>\n<body>\n<h1>" << detail::html_escape(options.title) << "</h1>\n";

  out << "<div class=\"legend\">";
  if (scale.degenerate()) {
    out << "All entropies are 1: no plaque detected.";
  } else {
    out << "Minimum entropy: " << detail::two_decimals(scale.min_entropy()) << ". Scale: ";
    const std::size_t steps = std::max<std::size_t>(2, options.legend_steps);
    for (std::size_t i = 0; i < steps; ++i) {
      double v = scale.min_entropy() + (1.0 - scale.min_entropy()) * static_cast<double>(i) / (steps - 1);
      Rgb c = scale.color(v);
      out << "<span class=\"swatch\" style=\"background:" << c.hex()
          << (c.lightness() < 0.5 ? ";color:#fff" : "") << "\">" << detail::two_decimals(v) << "</span>";
    }
  }
  out << "</div>\n";

  out << "<table>\n<thead><tr><th>#</th>";
  for (const auto& name : instance.schema().attributes()) out << "<th>" << detail::html_escape(name) << "</th>";
  out << "</tr></thead>\n<tbody>\n";
  for (std::size_t r = 0; r < instance.rows(); ++r) {
    out << "<tr><th>" << instance.row_id(r) << "</th>";
    for (std::size_t a = 0; a < instance.arity(); ++a) {
      const double v = matrix.value(r, a);
      Rgb c = scale.color(v);
      out << "<td style=\"background:" << c.hex() << (c.lightness() < 0.5 ? ";color:#fff" : "")
          << "\" title=\"entropy " << detail::two_decimals(v) << "\">" << detail::html_escape(instance.text({r, a}))
          << "</td>";
    }
    out << "</tr>\n";
  }
  out << "</tbody>\n</table>\n</body>\n</html>\n";
  return out.str();
}

// Bins are [i/bins, (i+1)/bins) except the last, which also holds 1.
inline std::vector<std::size_t> histogram_counts(const EntropyMatrix& matrix, std::size_t bins) {
  if (bins == 0) throw ValidationError("histogram needs at least one bin");
  std::vector<std::size_t> counts(bins, 0);
  for (const auto& cell : matrix.cells()) {
    double v = std::clamp(cell.value, 0.0, 1.0);
    auto i = static_cast<std::size_t>(std::floor(v * static_cast<double>(bins)));
    counts[std::min(i, bins - 1)]++;
  }
  return counts;
}

inline std::string render_histogram(const EntropyMatrix& matrix, std::size_t bins) {
  auto counts = histogram_counts(matrix, bins);
  std::ostringstream out;
  out << "bin_lower,bin_upper,count\n";
  for (std::size_t i = 0; i < bins; ++i)
    out << format_double(static_cast<double>(i) / bins) << ',' << format_double(static_cast<double>(i + 1) / bins)
        << ',' << counts[i] << '\n';
  return out.str();
}

inline std::string export_matrix_csv(const EntropyMatrix& matrix) {
  std::ostringstream out;
  const auto& attrs = matrix.schema().attributes();
  for (std::size_t a = 0; a < attrs.size(); ++a) {
    if (a) out << ',';
    write_csv_field(out, attrs[a]);
  }
  out << '\n';
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    for (std::size_t a = 0; a < matrix.cols(); ++a) {
      if (a) out << ',';
      out << format_double(matrix.value(r, a));
    }
    out << '\n';
  }
  return out.str();
}

// Values only: cells come back as plain exact entries without provenance.
inline EntropyMatrix parse_matrix_csv(std::string_view text) {
  detail::CsvReader reader(text, ',');
  std::vector<std::string> fields;
  std::size_t line = 0;
  if (!reader.next(fields, line)) return EntropyMatrix{};
  Schema schema(fields);
  std::vector<std::vector<double>> rows;
  while (reader.next(fields, line)) {
    if (fields.size() != schema.size()) throw IngestError("ragged matrix row", line);
    std::vector<double> row;
    for (const auto& f : fields) row.push_back(parse_double(f));
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> ids(rows.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i + 1;
  EntropyMatrix m(std::move(schema), std::move(ids));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t a = 0; a < rows[r].size(); ++a) {
      auto& cell = m.at({r, a});
      cell.value = rows[r][a];
      cell.preset = false;
      cell.dyadic.reset();
    }
  return m;
}

inline constexpr int kMatrixJsonVersion = 1;

inline std::string export_matrix_json(const EntropyMatrix& matrix) {
  using json = nlohmann::ordered_json;
  json doc;
  doc["format"] = "plaque-entropy-matrix";
  doc["version"] = kMatrixJsonVersion;
  doc["attributes"] = matrix.schema().attributes();
  doc["row_ids"] = matrix.row_ids();

  const auto& info = matrix.info();
  json run;
  run["mode"] = info.mode;
  run["seed"] = info.seed ? json(*info.seed) : json(nullptr);
  run["epsilon"] = info.epsilon ? json(*info.epsilon) : json(nullptr);
  run["delta"] = info.delta ? json(*info.delta) : json(nullptr);
  run["iterations"] = info.iterations ? json(*info.iterations) : json(nullptr);
  run["samples_drawn"] = info.samples_drawn;
  run["data_digest"] = info.data_digest;
  run["fd_digest"] = info.fd_digest;
  doc["run"] = std::move(run);
  doc["min_value"] = matrix.min_value();

  json rows = json::array();
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    json row = json::array();
    for (std::size_t a = 0; a < matrix.cols(); ++a) {
      const auto& c = matrix.at({r, a});
      json cell;
      cell["value"] = c.value;
      cell["method"] = to_string(c.method);
      cell["preset"] = c.preset;
      if (c.method == Method::exact) {
        cell["dyadic"] = c.dyadic ? json(c.dyadic->to_string()) : json(nullptr);
      } else {
        cell["successes"] = c.successes;
        cell["iterations"] = c.iterations;
      }
      row.push_back(std::move(cell));
    }
    rows.push_back(std::move(row));
  }
  doc["cells"] = std::move(rows);
  return doc.dump(2) + "\n";
}

inline EntropyMatrix parse_matrix_json(std::string_view text) {
  using json = nlohmann::ordered_json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ReportError(std::string("invalid matrix JSON: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != "plaque-entropy-matrix") throw ReportError("not an entropy matrix");
    if (doc.at("version").get<int>() != kMatrixJsonVersion) throw ReportError("unsupported matrix JSON version");
    EntropyMatrix m(Schema(doc.at("attributes").get<std::vector<std::string>>()),
                    doc.at("row_ids").get<std::vector<std::size_t>>());
    const auto& run = doc.at("run");
    auto& info = m.info();
    info.mode = run.at("mode").get<std::string>();
    if (!run.at("seed").is_null()) info.seed = run.at("seed").get<std::uint64_t>();
    if (!run.at("epsilon").is_null()) info.epsilon = run.at("epsilon").get<double>();
    if (!run.at("delta").is_null()) info.delta = run.at("delta").get<double>();
    if (!run.at("iterations").is_null()) info.iterations = run.at("iterations").get<std::uint64_t>();
    info.samples_drawn = run.at("samples_drawn").get<std::uint64_t>();
    info.data_digest = run.at("data_digest").get<std::string>();
    info.fd_digest = run.at("fd_digest").get<std::string>();

    const auto& rows = doc.at("cells");
    if (rows.size() != m.rows()) throw ReportError("cell rows do not match row_ids");
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (rows[r].size() != m.cols()) throw ReportError("cell columns do not match attributes");
      for (std::size_t a = 0; a < m.cols(); ++a) {
        const auto& j = rows[r][a];
        auto& c = m.at({r, a});
        c.value = j.at("value").get<double>();
        c.preset = j.at("preset").get<bool>();
        const auto method = j.at("method").get<std::string>();
        if (method == "exact") {
          c.method = Method::exact;
          c.dyadic.reset();
          if (!j.at("dyadic").is_null()) c.dyadic = DyadicValue::parse(j.at("dyadic").get<std::string>());
        } else if (method == "mc") {
          c.method = Method::mc;
          c.dyadic.reset();
          c.successes = j.at("successes").get<std::uint64_t>();
          c.iterations = j.at("iterations").get<std::uint64_t>();
        } else {
          throw ReportError("unknown method '" + method + "'");
        }
      }
    }
    return m;
  } catch (const nlohmann::ordered_json::exception& e) {
    throw ReportError(std::string("malformed matrix JSON: ") + e.what());
  }
}

enum class ExportFormat { csv, json };

inline std::string export_matrix(const EntropyMatrix& matrix, ExportFormat format) {
  return format == ExportFormat::csv ? export_matrix_csv(matrix) : export_matrix_json(matrix);
}

}  // namespace plaque
