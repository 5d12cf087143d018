#include "csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>

#include "pvsde/error.hpp"

namespace pvsde::csv {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::vector<std::string_view> lines(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (trim(line).empty() || trim(line).front() == '#') line = {};
        out.push_back(line);
        start = end + 1;
    }
    return out;
}

bool is_missing(std::string_view field) {
    std::string lower(field);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    return lower.empty() || lower == "nan" || lower == "na" || lower == "null";
}

double number(std::string_view field, std::string_view source, std::size_t line, std::string_view column) {
    if (is_missing(field)) return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    require(ec == std::errc{} && ptr == field.data() + field.size(), ErrorKind::Data,
            std::string(source) + ":" + std::to_string(line) + ": column '" + std::string(column) + "': '" +
                std::string(field) + "' is not a number");
    return v;
}

}  // namespace pvsde::csv
