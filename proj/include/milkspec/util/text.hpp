#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace milkspec::text {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

/// Reads a whole file; throws DataError when it cannot be opened.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace milkspec::text
