#pragma once

#include <string>
#include <vector>

namespace bayesbench {

/// A table cell. Numbers keep full precision for CSV and are rounded to
/// `decimals` in markdown.
struct Cell {
  std::string text;
  double value = 0;
  bool numeric = false;
  int decimals = 2;

  Cell(std::string s) : text(std::move(s)) {}
  Cell(const char* s) : text(s) {}
  Cell(double v, int d = 2) : value(v), numeric(true), decimals(d) {}
};

struct Table {
  std::string title;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
  std::string to_csv() const;
  std::string to_markdown() const;
};

/// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite values.
std::string format_shortest(double v);
std::string format_fixed(double v, int decimals);

}  // namespace bayesbench
