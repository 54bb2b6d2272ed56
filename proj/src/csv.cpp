#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "bayesbench/error.hpp"
#include "bayesbench/harness.hpp"

namespace bayesbench {
namespace {

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

class RowParser {
 public:
  RowParser(const std::vector<std::string>& cells, const std::vector<std::string>& header, long line)
      : cells_(cells), header_(header), line_(line) {}

  const std::string& text(std::size_t col) const { return cells_[col]; }

  double real(std::size_t col) const {
    double v = 0;
    const auto& s = cells_[col];
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) fail(col, "expected a number");
    return v;
  }

  long integer(std::size_t col) const {
    long v = 0;
    const auto& s = cells_[col];
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) fail(col, "expected an integer");
    return v;
  }

  bool boolean(std::size_t col) const {
    const auto& s = cells_[col];
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    fail(col, "expected true or false");
  }

  [[noreturn]] void fail(std::size_t col, const std::string& what) const {
    throw ValidationError("line " + std::to_string(line_) + ", column " + std::to_string(col + 1) + " (" +
                          header_[col] + "): " + what + ", got '" + cells_[col] + "'");
  }

 private:
  const std::vector<std::string>& cells_;
  const std::vector<std::string>& header_;
  long line_;
};

}  // namespace

std::string epsilon_label(double eps) {
  if (eps > 0 && eps < 0.01) {
    const int e = static_cast<int>(std::floor(std::log10(eps) + 1e-9));
    const double mantissa = eps / std::pow(10.0, e);
    std::string m = std::abs(mantissa - std::round(mantissa)) < 1e-9 ? shortest(std::round(mantissa))
                                                                       : shortest(mantissa);
    return m + "e" + std::to_string(e);
  }
  return shortest(eps);
}

std::vector<std::string> csv_header(const std::vector<double>& epsilons) {
  std::vector<std::string> h{"algorithm", "benchmark", "dimension", "noise",
                             "budget_per_dim", "repetition", "delta_f", "euclid"};
  for (double e : epsilons) h.push_back("solved_" + epsilon_label(e));
  for (double e : epsilons) h.push_back("feval_" + epsilon_label(e));
  h.push_back("cpu_seconds");
  return h;
}

void write_csv(const Dataset& data, std::ostream& out) {
  const auto header = csv_header(data.epsilons);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  const std::size_t k = data.epsilons.size();
  for (const auto& r : data.rows) {
    if (r.solved.size() != k || r.feval.size() != k) {
      throw ValidationError("row " + r.algorithm + "/" + r.benchmark + " does not match the epsilon grid");
    }
    if (r.algorithm.find(',') != std::string::npos || r.benchmark.find(',') != std::string::npos) {
      throw ValidationError("ids must not contain commas");
    }
    out << r.algorithm << ',' << r.benchmark << ',' << r.dimension << ',' << shortest(r.noise) << ','
        << r.budget_per_dim << ',' << r.repetition << ',' << shortest(r.delta_f) << ',' << shortest(r.euclid);
    for (std::size_t e = 0; e < k; ++e) out << ',' << (r.solved[e] ? "true" : "false");
    for (std::size_t e = 0; e < k; ++e) {
      out << ',';
      if (r.feval[e]) out << *r.feval[e];
    }
    out << ',' << shortest(r.cpu_seconds) << '\n';
  }
}

void write_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_csv(data, out);
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

Dataset read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("line 1: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);

  // Epsilons are recovered from the solved_* columns, then the whole header
  // must match the canonical layout for that grid.
  Dataset data;
  data.epsilons.clear();
  for (const auto& h : header) {
    if (h.rfind("solved_", 0) != 0) continue;
    const std::string label = h.substr(7);
    double eps = 0;
    const auto res = std::from_chars(label.data(), label.data() + label.size(), eps);
    if (res.ec != std::errc() || res.ptr != label.data() + label.size()) {
      throw ValidationError("line 1: bad epsilon column '" + h + "'");
    }
    data.epsilons.push_back(eps);
  }
  const auto expected = csv_header(data.epsilons);
  if (header != expected) {
    std::string want;
    for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
    throw ValidationError("line 1: header mismatch, expected " + want);
  }

  const std::size_t k = data.epsilons.size();
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw ValidationError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                            " columns, got " + std::to_string(cells.size()));
    }
    RowParser p(cells, header, line_no);
    RunRecord r;
    r.algorithm = p.text(0);
    r.benchmark = p.text(1);
    r.dimension = static_cast<int>(p.integer(2));
    r.noise = p.real(3);
    r.budget_per_dim = p.integer(4);
    r.repetition = static_cast<int>(p.integer(5));
    r.delta_f = p.real(6);
    r.euclid = p.real(7);
    for (std::size_t e = 0; e < k; ++e) r.solved.push_back(p.boolean(8 + e));
    for (std::size_t e = 0; e < k; ++e) {
      const std::size_t col = 8 + k + e;
      if (p.text(col).empty()) {
        if (r.solved[e]) p.fail(col, "solved run needs an evaluation count");
        r.feval.emplace_back();
      } else {
        if (!r.solved[e]) p.fail(col, "unsolved run must leave this field empty");
        r.feval.emplace_back(p.integer(col));
      }
    }
    r.cpu_seconds = p.real(8 + 2 * k);
    data.rows.push_back(std::move(r));
  }
  return data;
}

Dataset read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return read_csv(in);
}

}  // namespace bayesbench
