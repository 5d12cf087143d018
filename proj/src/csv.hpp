#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pvsde::csv {

/// Splits one line on commas and trims blanks. Quoting is not supported;
/// none of the pipeline's files need it.
std::vector<std::string> split(std::string_view line);

/// Lines without the trailing carriage return; blank lines and lines
/// starting with '#' are reported as empty strings so line numbers hold.
std::vector<std::string_view> lines(std::string_view text);

/// Empty, "nan", "na" and "null" (any case) are missing.
bool is_missing(std::string_view field);

/// Parses a number; throws Error(Data) naming source, line and column.
double number(std::string_view field, std::string_view source, std::size_t line, std::string_view column);

}  // namespace pvsde::csv
