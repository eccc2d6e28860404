#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace intan::csv {

struct Table {
  std::vector<std::string> header;
  // Data rows; row_numbers[i] is the 1-based line number of rows[i] in the source file.
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> row_numbers;

  /// Column position by name, or nullopt.
  std::optional<std::size_t> column(std::string_view name) const;
};

/// Reads a delimited text file with a mandatory header row. Blank lines are skipped,
/// lines starting with '#' are comments. Quoted fields are not supported.
/// Throws FileUnreadable, SchemaMismatch (no header).
Table read(const std::filesystem::path& path, char delimiter = ',');
Table parse(std::string_view text, char delimiter = ',');

std::vector<std::string> split(std::string_view line, char delimiter);
std::string_view trim(std::string_view s);

/// Locale-independent full-precision parse. Returns nullopt on blank or malformed text.
std::optional<double> parse_double(std::string_view s);
std::optional<long> parse_int(std::string_view s);

/// Shortest decimal representation that round-trips to the same double; NaN gives "".
std::string format_double(double v);

/// Writes `text` to `path`, creating parent directories.
void write_file(const std::filesystem::path& path, std::string_view text);
std::string read_file(const std::filesystem::path& path);

}  // namespace intan::csv
