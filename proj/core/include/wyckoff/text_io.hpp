#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wyckoff::text {

/// Decimal text with 17 significant digits; round-trips every finite double.
std::string format_real(double v);

/// Parses a complete decimal numeral; nullopt on trailing junk or non-finite.
std::optional<double> parse_real(std::string_view s);

/// Comma-separated cells of one line; no quoting, trailing '\r' dropped.
std::vector<std::string_view> split_csv(std::string_view line);

/// Lines of `text` split on LF; a trailing '\r' on each line is dropped.
std::vector<std::string_view> split_lines(std::string_view text);

/// Whole file contents; throws DataError naming the path.
std::string read_file(const std::filesystem::path& path);

/// Writes `content` to `path` verbatim; throws DataError naming the path.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace wyckoff::text
