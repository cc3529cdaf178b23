#pragma once

// Locale-independent CSV for dense arrays, round-trip float formatting and
// file checksums.

#include "kot/linalg.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace kot::io {

// Shortest form is not used: always 17 significant digits, so output is
// stable across platforms and parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view s);

struct CsvTable {
  std::vector<std::string> header;
  Matrix values;
};

// Rows separated by '\n', comma-separated, optional header line.
std::string to_csv(const Matrix& m, const std::vector<std::string>& header = {});
void write_csv(const std::filesystem::path& path, const Matrix& m,
               const std::vector<std::string>& header = {});

// A first line that does not parse as numbers is taken as the header.
CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace kot::io
