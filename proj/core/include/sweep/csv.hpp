#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sweep/path.hpp"

namespace sweep {

/// Comment lines (without the leading '#'), a header and a numeric body.
struct CsvTable {
  std::vector<std::string> metadata;
  std::vector<std::string> header;
  Matrix body;  // rows x columns

  Eigen::Index column(const std::string& name) const;  // throws std::invalid_argument if absent
};

/// Shortest text that is guaranteed to parse back to the same double ("%.17g").
std::string format_double(double v);

std::string to_csv_text(const CsvTable& table);
CsvTable parse_csv_text(const std::string& text);

CsvTable read_csv(const std::filesystem::path& path);
/// Writes to a sibling temporary file, then renames it over `path`.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
void write_csv_atomic(const std::filesystem::path& path, const CsvTable& table);

/// Path on the grid given by column `time_column`, with the listed columns as
/// coordinates.
SamplePath path_from_csv(const CsvTable& table, const std::vector<std::string>& columns,
                         const std::string& time_column = "t");

}  // namespace sweep
