#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace courtvec::text {

std::vector<std::string_view> split(std::string_view s, char sep);

/// Splits one CSV record, honouring double-quoted fields ("" escapes a quote).
std::vector<std::string> split_csv(std::string_view line);

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);

std::optional<long long> parse_int(std::string_view s);
std::optional<double> parse_double(std::string_view s);

/// Shortest decimal form that round-trips to the same double.
std::string format_double(double x);

/// Strips a trailing '\r' so CRLF files parse like LF files.
std::string_view chomp(std::string_view line);

}  // namespace courtvec::text
