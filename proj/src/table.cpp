#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "bayesbench/error.hpp"
#include "bayesbench/table.hpp"

namespace bayesbench {
namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string render(const Cell& c, bool markdown) {
  if (!c.numeric) return c.text;
  return markdown ? format_fixed(c.value, c.decimals) : format_shortest(c.value);
}

}  // namespace

std::string format_shortest(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_fixed(double v, int decimals) {
  if (!std::isfinite(v)) return format_shortest(v);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  std::string s(buf);
  if (s.find_first_not_of("-0.") == std::string::npos && s[0] == '-') s.erase(0, 1);  // no "-0.00"
  return s;
}

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw std::logic_error("table row width does not match the header");
  rows.push_back(std::move(row));
}

std::string Table::to_csv() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << csv_field(columns[i]);
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(render(row[i], false));
    out << '\n';
  }
  return out.str();
}

std::string Table::to_markdown() const {
  std::ostringstream out;
  if (!title.empty()) out << "**" << title << "**\n\n";
  out << '|';
  for (const auto& c : columns) out << ' ' << c << " |";
  out << "\n|";
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? " ---: |" : " --- |");
  out << '\n';
  for (const auto& row : rows) {
    out << '|';
    for (const auto& c : row) out << ' ' << render(c, true) << " |";
    out << '\n';
  }
  return out.str();
}

}  // namespace bayesbench
