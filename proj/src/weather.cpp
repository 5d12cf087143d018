#include "pvsde/weather.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "csv.hpp"
#include "pvsde/error.hpp"
#include "pvsde/serialize.hpp"

namespace pvsde {

namespace {

constexpr std::array<const char*, 16> kCompass{"N", "NNE", "NE", "ENE", "E", "ESE", "SE", "SSE",
                                               "S", "SSW", "SW", "WSW", "W", "WNW", "NW", "NNW"};
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) { return std::isfinite(v) ? format_double(v) : std::string(); }

}  // namespace

std::vector<std::string> weather_feature_names() {
    return {kWeatherFeatureNames.begin(), kWeatherFeatureNames.end()};
}

std::optional<double> parse_wind_direction(std::string_view text) {
    if (csv::is_missing(text)) return std::nullopt;
    std::string upper(text);
    std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
    for (std::size_t i = 0; i < kCompass.size(); ++i)
        if (upper == kCompass[i]) return 22.5 * static_cast<double>(i);
    double deg = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), deg);
    require(ec == std::errc{} && ptr == text.data() + text.size() && deg >= 0.0 && deg <= 360.0, ErrorKind::Data,
            "unknown wind direction '" + std::string(text) + "'");
    return deg;
}

std::string compass_label(double degrees) {
    const double wrapped = std::fmod(std::fmod(degrees, 360.0) + 360.0, 360.0);
    return kCompass[static_cast<std::size_t>(std::llround(wrapped / 22.5)) % kCompass.size()];
}

std::array<double, 9> encode_weather(const WeatherRecord& r) {
    const double rad = r.wind_direction * std::numbers::pi / 180.0;
    return {r.temperature, r.humidity,     r.pressure,     r.precipitation, r.wind_speed,
            std::sin(rad), std::cos(rad), r.cloud_okta, r.irradiance};
}

std::vector<WeatherRecord> parse_weather_csv(const std::string& text, const std::string& source) {
    const auto rows = csv::lines(text);
    std::size_t header_line = 0;
    while (header_line < rows.size() && rows[header_line].empty()) ++header_line;
    require(header_line < rows.size(), ErrorKind::Data, source + ": empty weather file");

    const auto header = csv::split(rows[header_line]);
    const auto required = csv::split(kWeatherCsvHeader);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    for (const auto& name : required)
        require(col.count(name) == 1, ErrorKind::Data, source + ": missing column '" + name + "'");

    std::vector<WeatherRecord> out;
    for (std::size_t li = header_line + 1; li < rows.size(); ++li) {
        if (rows[li].empty()) continue;
        const std::size_t line = li + 1;
        const auto f = csv::split(rows[li]);
        const std::string where = source + ":" + std::to_string(line);
        require(f.size() == header.size(), ErrorKind::Data,
                where + ": expected " + std::to_string(header.size()) + " fields, got " + std::to_string(f.size()));
        WeatherRecord r;
        try {
            r.timestamp = parse_iso8601(f[col["timestamp"]]);
            const auto dir = parse_wind_direction(f[col["wind_direction"]]);
            r.wind_direction = dir ? *dir : kNaN;
        } catch (const Error& e) {
            throw Error(ErrorKind::Data, where + ": " + e.what());
        }
        auto num = [&](const char* name) { return csv::number(f[col[name]], source, line, name); };
        r.temperature = num("temperature");
        r.humidity = num("humidity");
        r.pressure = num("pressure");
        r.precipitation = num("precipitation");
        r.wind_speed = num("wind_speed");
        r.cloud_okta = num("cloud_okta");
        r.irradiance = num("irradiance");
        require(std::isnan(r.cloud_okta) || (r.cloud_okta >= 0.0 && r.cloud_okta <= 9.0), ErrorKind::Data,
                where + ": cloud okta " + f[col["cloud_okta"]] + " outside [0, 9]");
        require(std::isnan(r.humidity) || (r.humidity >= 0.0 && r.humidity <= 100.0), ErrorKind::Data,
                where + ": humidity " + f[col["humidity"]] + " outside [0, 100]");
        require(std::isnan(r.precipitation) || r.precipitation >= 0.0, ErrorKind::Data,
                where + ": negative precipitation");
        require(std::isnan(r.wind_speed) || r.wind_speed >= 0.0, ErrorKind::Data, where + ": negative wind speed");
        require(std::isnan(r.irradiance) || r.irradiance >= 0.0, ErrorKind::Data, where + ": negative irradiance");
        out.push_back(r);
    }
    return out;
}

std::vector<WeatherRecord> read_weather_csv(const std::filesystem::path& path) {
    return parse_weather_csv(read_file(path), path.string());
}

std::string format_weather_csv(const std::vector<WeatherRecord>& records, double utc_offset_hours) {
    std::string out = std::string(kWeatherCsvHeader) + "\n";
    for (const auto& r : records) {
        out += format_iso8601_local(r.timestamp, utc_offset_hours) + "," + fmt(r.temperature) + "," +
               fmt(r.humidity) + "," + fmt(r.pressure) + "," + fmt(r.precipitation) + "," + fmt(r.wind_speed) + "," +
               (std::isfinite(r.wind_direction) ? compass_label(r.wind_direction) : std::string()) + "," +
               fmt(r.cloud_okta) + "," + fmt(r.irradiance) + "\n";
    }
    return out;
}

WeatherDays group_weather_days(const std::vector<WeatherRecord>& records, double utc_offset_hours,
                               int grid_start_hour, std::size_t m, double max_missing_fraction) {
    require(grid_start_hour >= 0 && grid_start_hour + static_cast<int>(m) <= 24, ErrorKind::Config,
            "hour grid must stay within one day");
    std::map<std::string, std::array<const WeatherRecord*, 24>> by_date;
    for (const auto& r : records) {
        auto& hours = by_date.try_emplace(local_date(r.timestamp, utc_offset_hours)).first->second;
        const int h = local_hour(r.timestamp, utc_offset_hours);
        require(hours[static_cast<std::size_t>(h)] == nullptr, ErrorKind::Data,
                "duplicate weather report for " + format_iso8601(r.timestamp));
        hours[static_cast<std::size_t>(h)] = &r;
    }

    WeatherDays out;
    const std::size_t p = kWeatherFeatureNames.size();
    for (const auto& [date, hours] : by_date) {
        WeatherDay day;
        day.date = date;
        day.m = m;
        day.feature_names = weather_feature_names();
        day.features.assign(m * p, kNaN);
        std::size_t missing = 0;
        for (std::size_t i = 0; i < m; ++i) {
            const WeatherRecord* r = hours[static_cast<std::size_t>(grid_start_hour) + i];
            if (r) {
                const auto enc = encode_weather(*r);
                std::copy(enc.begin(), enc.end(), day.features.begin() + static_cast<std::ptrdiff_t>(i * p));
            }
        }
        for (double v : day.features) missing += std::isnan(v) ? 1 : 0;
        const double fraction = static_cast<double>(missing) / static_cast<double>(day.features.size());
        if (fraction > max_missing_fraction) {
            out.warnings.push_back("weather day " + date + " dropped: " + format_double(100.0 * fraction) +
                                   "% of grid-hour features missing");
            continue;
        }
        out.days.push_back(std::move(day));
    }
    return out;
}

WeatherImputer WeatherImputer::fit(const std::vector<WeatherDay>& days) {
    require(!days.empty(), ErrorKind::Data, "cannot fit imputation medians on zero days");
    const std::size_t width = days.front().features.size();
    WeatherImputer imp;
    imp.medians.assign(width, 0.0);
    std::vector<double> column;
    for (std::size_t k = 0; k < width; ++k) {
        column.clear();
        for (const auto& d : days) {
            require(d.features.size() == width, ErrorKind::Dimension, "weather days differ in width");
            if (std::isfinite(d.features[k])) column.push_back(d.features[k]);
        }
        if (column.empty()) continue;
        std::sort(column.begin(), column.end());
        const std::size_t n = column.size();
        imp.medians[k] = n % 2 ? column[n / 2] : 0.5 * (column[n / 2 - 1] + column[n / 2]);
    }
    return imp;
}

std::size_t WeatherImputer::apply(WeatherDay& day) const {
    require(day.features.size() == medians.size(), ErrorKind::Dimension,
            "weather day " + day.date + " does not match the imputation schema");
    std::size_t filled = 0;
    for (std::size_t k = 0; k < medians.size(); ++k) {
        if (!std::isfinite(day.features[k])) {
            day.features[k] = medians[k];
            ++filled;
        }
    }
    return filled;
}

}  // namespace pvsde
