#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace kickjt {

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double x);

using CsvCell = std::variant<double, long long, std::string>;

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<CsvCell>> rows;

  /// Throws DimensionMismatchError when the row width differs from the header.
  void add_row(std::vector<CsvCell> row);
  std::string render() const;
};

/// Writes content next to path under a temporary name, then renames it over
/// path, so readers never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace kickjt
