#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "gridclear/errors.hpp"

namespace gridclear {

using CsvCell = std::variant<std::string, std::int64_t, double>;

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<CsvCell>> rows;
};

/// Reals print with six decimals; a value that rounds to zero prints without
/// a sign.
inline std::string format_cell(const CsvCell& cell) {
  if (const auto* s = std::get_if<std::string>(&cell)) return *s;
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", std::get<double>(cell));
  std::string out(buf);
  if (out == "-0.000000") out = "0.000000";
  return out;
}

inline void write_csv(std::ostream& out, const CsvTable& table) {
  auto line = [&](const auto& cells, auto&& fmt) {
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (j) out << ',';
      out << fmt(cells[j]);
    }
    out << '\n';
  };
  line(table.header, [](const std::string& s) { return s; });
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) throw DomainError("csv row width differs from header");
    line(row, format_cell);
  }
}

inline void emit_csv(const CsvTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_csv(out, table);
  out.flush();
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace gridclear
