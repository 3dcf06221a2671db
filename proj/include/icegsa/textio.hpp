#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace icegsa {

/// Shortest decimal text that parses back to the identical double.
std::string format_double(double value);

/// Strict parse of the whole (trimmed) string; nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_integer(std::string_view text);

std::string_view trim(std::string_view text);
std::vector<std::string> split(std::string_view text, char separator);

}  // namespace icegsa
