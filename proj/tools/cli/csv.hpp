#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace sve::cli {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws a configuration error when missing.
  std::size_t column(std::string_view name) const;
};

/// RFC 4180 reader: comma separator, double-quote quoting, header row.
CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);

std::string csv_field(std::string_view s);
std::string csv_number(double v);

void write_csv(const std::filesystem::path& path, const CsvTable& table);

}  // namespace sve::cli
