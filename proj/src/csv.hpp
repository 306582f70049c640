#pragma once

// Minimal CSV helpers shared by the loaders. Internal to the library.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gsr::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row
};

/// Reads a comma-separated file with a header line. Accepts LF or CRLF, an
/// optional UTF-8 BOM, a missing trailing newline and double-quoted fields.
/// Blank lines are skipped.
Table read(const std::filesystem::path& path);

/// Throws MalformedCsv unless the header equals `expected`.
void require_header(const Table& table, const std::vector<std::string>& expected,
                    const std::filesystem::path& path);

std::optional<double> parse_double(std::string_view text);
std::optional<std::int64_t> parse_int(std::string_view text);

/// Shortest decimal text that parses back to the same double.
std::string format_exact(double v);
/// printf-style %.<digits>g.
std::string format_significant(double v, int digits);

void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace gsr::csv
