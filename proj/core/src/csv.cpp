#include "driveiv/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "driveiv/errors.hpp"

namespace driveiv {

namespace {

std::vector<std::vector<std::string>> parse_records(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool saw_any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        in_quotes = true;
        saw_any = true;
        break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        saw_any = true;
        break;
      case '\r':
        break;
      case '\n':
        if (saw_any || !field.empty() || !record.empty()) {
          record.push_back(std::move(field));
          field.clear();
          records.push_back(std::move(record));
          record.clear();
          saw_any = false;
        }
        break;
      default:
        field.push_back(ch);
        saw_any = true;
    }
  }
  if (saw_any || !field.empty() || !record.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  return records;
}

bool needs_quoting(const std::string& s) {
  return s.find_first_of(",\"\n\r") != std::string::npos;
}

void append_field(std::string& out, const std::string& s) {
  if (!needs_quoting(s)) {
    out += s;
    return;
  }
  out.push_back('"');
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
}

}  // namespace

std::size_t Table::column_index(const std::string& name) const {
  for (std::size_t j = 0; j < names.size(); ++j)
    if (names[j] == name) return j;
  throw MissingColumn("column '" + name + "' not found");
}

std::vector<double> Table::numeric_column(const std::string& name) const {
  const std::size_t j = column_index(name);
  std::vector<double> out;
  out.reserve(columns[j].size());
  for (const std::string& cell : columns[j]) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &pos);
    } catch (const std::exception&) {
      throw ValidationError("column '" + name + "' has non-numeric cell '" +
                            cell + "'");
    }
    if (pos != cell.size())
      throw ValidationError("column '" + name + "' has non-numeric cell '" +
                            cell + "'");
    out.push_back(v);
  }
  return out;
}

Table parse_csv(const std::string& text) {
  const auto records = parse_records(text);
  if (records.empty()) throw ValidationError("CSV has no header row");
  Table table;
  table.names = records.front();
  table.columns.resize(table.names.size());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.names.size())
      throw ValidationError("CSV row " + std::to_string(r) + " has " +
                            std::to_string(records[r].size()) +
                            " fields, expected " +
                            std::to_string(table.names.size()));
    for (std::size_t j = 0; j < records[r].size(); ++j)
      table.columns[j].push_back(records[r][j]);
  }
  return table;
}

Table read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

std::string to_csv_string(const Table& table) {
  std::string out;
  for (std::size_t j = 0; j < table.names.size(); ++j) {
    if (j) out.push_back(',');
    append_field(out, table.names[j]);
  }
  out.push_back('\n');
  for (std::size_t i = 0; i < table.n_rows(); ++i) {
    for (std::size_t j = 0; j < table.columns.size(); ++j) {
      if (j) out.push_back(',');
      append_field(out, table.columns[j][i]);
    }
    out.push_back('\n');
  }
  return out;
}

void write_csv(const Table& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << to_csv_string(table);
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace driveiv
