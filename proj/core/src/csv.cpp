#include "sweep/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <unistd.h>

namespace sweep {

Eigen::Index CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<Eigen::Index>(i);
  throw std::invalid_argument("CSV has no column '" + name + "'");
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_csv_text(const CsvTable& table) {
  std::string out;
  for (const auto& m : table.metadata) out += "#" + m + "\n";
  for (std::size_t i = 0; i < table.header.size(); ++i) out += (i ? "," : "") + table.header[i];
  out += "\n";
  for (Eigen::Index r = 0; r < table.body.rows(); ++r) {
    for (Eigen::Index c = 0; c < table.body.cols(); ++c) {
      if (c) out += ',';
      out += format_double(table.body(r, c));
    }
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_number(const std::string& s, std::size_t line_no) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
    throw std::invalid_argument("CSV line " + std::to_string(line_no) + ": cannot parse '" + s + "' as a number");
  return v;
}

}  // namespace

CsvTable parse_csv_text(const std::string& text) {
  CsvTable t;
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      t.metadata.push_back(line.substr(1));
      continue;
    }
    auto cells = split(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size())
      throw std::invalid_argument("CSV line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(t.header.size()) + " fields, got " + std::to_string(cells.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_number(c, line_no));
    rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw std::invalid_argument("CSV has no header line");
  t.body.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t.header.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      t.body(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open CSV file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv_text(ss.str());
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot move output into place at " + path.string() + ": " + ec.message());
  }
}

void write_csv_atomic(const std::filesystem::path& path, const CsvTable& table) {
  write_text_atomic(path, to_csv_text(table));
}

SamplePath path_from_csv(const CsvTable& table, const std::vector<std::string>& columns,
                         const std::string& time_column) {
  if (columns.empty()) throw std::invalid_argument("no CSV columns selected");
  if (table.body.rows() < 2) throw std::invalid_argument("CSV path needs at least two rows");
  const Eigen::Index tc = table.column(time_column);
  std::vector<double> times(static_cast<std::size_t>(table.body.rows()));
  for (Eigen::Index r = 0; r < table.body.rows(); ++r) times[static_cast<std::size_t>(r)] = table.body(r, tc);
  Matrix values(static_cast<Eigen::Index>(columns.size()), table.body.rows());
  for (std::size_t i = 0; i < columns.size(); ++i)
    values.row(static_cast<Eigen::Index>(i)) = table.body.col(table.column(columns[i])).transpose();
  return SamplePath(Grid(std::move(times)), std::move(values));
}

}  // namespace sweep
