#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include "isac/errors.hpp"

namespace isac {

// Shortest decimal representation that round-trips the double exactly;
// this is what keeps result files byte-stable run to run.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

using CsvCell = std::variant<std::string, double, long long>;

inline std::string csv_cell_text(const CsvCell& cell) {
  if (std::holds_alternative<double>(cell))
    return format_double(std::get<double>(cell));
  if (std::holds_alternative<long long>(cell))
    return std::to_string(std::get<long long>(cell));
  return std::get<std::string>(cell);
}

/// Row-ordered CSV writer with a fixed header; cells never need quoting here
/// (numeric data and identifier-like strings only).
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns)
      : out_(path, std::ios::binary), n_cols_(columns.size()) {
    if (!out_) throw ConfigError("csv: cannot open " + path + " for writing");
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) out_ << ',';
      out_ << columns[i];
    }
    out_ << '\n';
  }

  void write_row(const std::vector<CsvCell>& cells) {
    if (cells.size() != n_cols_)
      throw ConfigError("csv: row width does not match the header");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << csv_cell_text(cells[i]);
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
  std::size_t n_cols_;
};

}  // namespace isac
