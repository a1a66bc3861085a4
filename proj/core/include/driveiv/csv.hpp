#pragma once

#include <string>
#include <vector>

namespace driveiv {

// Column-major table of strings with a header row, as read from or written
// to RFC-4180-style CSV ('.' decimal, UTF-8, quoted fields supported).
struct Table {
  std::vector<std::string> names;
  std::vector<std::vector<std::string>> columns;

  std::size_t n_rows() const {
    return columns.empty() ? 0 : columns.front().size();
  }
  // Index of a named column; throws MissingColumn.
  std::size_t column_index(const std::string& name) const;
  std::vector<double> numeric_column(const std::string& name) const;
};

Table read_csv(const std::string& path);
Table parse_csv(const std::string& text);
void write_csv(const Table& table, const std::string& path);
std::string to_csv_string(const Table& table);

// Fixed-precision number formatting used by all report writers so that
// identical runs produce byte-identical files.
std::string format_number(double v);

}  // namespace driveiv
