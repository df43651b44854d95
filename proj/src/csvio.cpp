#include "freemax/csvio.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace freemax::csv {

std::string format(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format(long long v) {
  char buf[24];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& s) {
  double v = 0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  const auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc()) throw std::runtime_error("csv: bad number: " + s);
  return v;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\r')) cell.pop_back();
    std::size_t b = 0;
    while (b < cell.size() && cell[b] == ' ') ++b;
    out.push_back(cell.substr(b));
  }
  return out;
}

}  // namespace

void write_values(const std::string& path, const std::vector<double>& values) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("csv: cannot write " + path);
  f << "value\n";
  for (double v : values) f << format(v) << '\n';
}

std::vector<double> read_values(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("csv: cannot read " + path);
  std::string line;
  if (!std::getline(f, line) || split_line(line).empty() || split_line(line)[0] != "value")
    throw std::runtime_error("csv: expected `value` header in " + path);
  std::vector<double> out;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    out.push_back(parse_double(line));
  }
  return out;
}

void write_table(const std::string& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("csv: cannot write " + path);
  for (std::size_t i = 0; i < header.size(); ++i)
    f << header[i] << (i + 1 < header.size() ? "," : "");
  f << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      f << row[i] << (i + 1 < row.size() ? "," : "");
    f << '\n';
  }
}

std::vector<std::vector<std::string>> read_table(const std::string& path,
                                                 std::vector<std::string>* header) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("csv: cannot read " + path);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  bool first = true;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (first && header) {
      *header = std::move(cells);
      first = false;
      continue;
    }
    first = false;
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace freemax::csv
