#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace alefem::bench {

/// Round-trippable decimal form with 17 significant digits.
inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Header plus rows of plain fields (no quoting; fields must not contain
/// commas or newlines).
class CsvTable {
 public:
  CsvTable() = default;
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }

  void add_row(std::vector<std::string> fields) {
    if (fields.size() != header_.size()) throw std::invalid_argument("CsvTable: row width differs from header");
    for (const auto& f : fields)
      if (f.find_first_of(",\n\r") != std::string::npos) throw std::invalid_argument("CsvTable: field contains separator");
    rows_.push_back(std::move(fields));
  }

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header_.size(); ++i)
      if (header_[i] == name) return i;
    throw std::out_of_range("CsvTable: no column '" + name + "'");
  }

  void write(std::ostream& os) const {
    write_line(os, header_);
    for (const auto& r : rows_) write_line(os, r);
  }

  void write_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    write(out);
  }

 private:
  static void write_line(std::ostream& os, const std::vector<std::string>& f) {
    for (std::size_t i = 0; i < f.size(); ++i) os << (i ? "," : "") << f[i];
    os << '\n';
  }

  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Parse a table written by CsvTable. Throws std::runtime_error on a missing
/// header or a row whose width differs from the header.
inline CsvTable parse_csv(std::istream& in) {
  auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) out.push_back(f);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
  };
  std::string line;
  if (!std::getline(in, line) || line.empty()) throw std::runtime_error("csv: missing header");
  if (line.back() == '\r') line.pop_back();
  CsvTable t(split(line));
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line);
    if (fields.size() != t.header().size())
      throw std::runtime_error("csv line " + std::to_string(lineno) + ": expected " + std::to_string(t.header().size()) +
                               " fields, got " + std::to_string(fields.size()));
    t.add_row(std::move(fields));
  }
  return t;
}

inline CsvTable parse_csv_string(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in);
}

}  // namespace alefem::bench
