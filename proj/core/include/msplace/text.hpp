#pragma once

#include <string>
#include <string_view>
#include <vector>

// Small parsing and formatting helpers shared by the text file formats.
namespace msplace::text {

std::string_view trim(std::string_view s);
std::vector<std::string> split_ws(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
bool starts_with(std::string_view s, std::string_view prefix);

/// Strict conversions; throw ValidationError naming `what` on failure.
double to_double(std::string_view s, std::string_view what);
long long to_int(std::string_view s, std::string_view what);
unsigned long long to_u64(std::string_view s, std::string_view what);

/// Exact round-trip representation (C99 hex float).
std::string hex(double v);
/// Shortest decimal that round-trips exactly.
std::string exact(double v);
/// Compact decimal form used in CSV and SVG output ("%.10g").
std::string decimal(double v);

std::string to_upper(std::string_view s);

}  // namespace msplace::text
