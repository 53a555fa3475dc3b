#pragma once

// Tabular output shared by every subcommand. Numbers are written as the
// shortest decimal that reads back to the same double.

#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace dtcm::app {

/// Empty cells print as nothing in CSV and null in JSON.
using Cell = std::variant<std::monostate, bool, long long, double, std::string>;

std::string format_number(double value);
std::string format_cell(const Cell& cell);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  /// Throws std::logic_error if the row width differs from the header.
  void add(std::vector<Cell> row);
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

struct Report {
  KeyValues meta;     // program, version and resolved flags, in order
  Table table;
  KeyValues summary;  // footer lines
};

/// "# key=value ..." line, header row, data rows, then "# key: value" footers.
void write_csv(std::ostream& out, const Report& report);

/// {"meta": {...}, "rows": [{column: value}, ...], "summary": {...}}
void write_json(std::ostream& out, const Report& report);

}  // namespace dtcm::app
