#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pvsde/ensemble.hpp"
#include "pvsde/timeutil.hpp"

namespace pvsde {

/// One hourly weather report row. Missing numeric fields are NaN. The
/// timestamp marks the start of the hour the report describes.
struct WeatherRecord {
    UtcSeconds timestamp = 0;
    double temperature = 0.0;    // deg C
    double humidity = 0.0;       // %
    double pressure = 0.0;       // hPa
    double precipitation = 0.0;  // mm
    double wind_speed = 0.0;     // m/s
    double wind_direction = 0.0; // degrees clockwise from north, NaN if missing
    double cloud_okta = 0.0;     // 0-9
    double irradiance = 0.0;     // MJ/m^2
};

inline constexpr std::array<const char*, 9> kWeatherFeatureNames{
    "temperature", "humidity", "pressure", "precipitation", "wind_speed",
    "wind_sin",    "wind_cos", "cloud_okta", "irradiance"};

inline constexpr const char* kWeatherCsvHeader =
    "timestamp,temperature,humidity,pressure,precipitation,wind_speed,wind_direction,cloud_okta,irradiance";

std::vector<std::string> weather_feature_names();

/// Degrees of a 16-point compass label (N = 0, clockwise in 22.5 degree
/// steps) or of a numeric string in [0, 360]. Empty text means missing.
/// Unknown labels throw Error(Data).
std::optional<double> parse_wind_direction(std::string_view text);

/// Nearest 16-point label for an angle in degrees.
std::string compass_label(double degrees);

/// Encodes one report into the p = 9 features, wind direction as
/// (sin, cos) of its angle.
std::array<double, 9> encode_weather(const WeatherRecord& record);

/// Parses a weather CSV with kWeatherCsvHeader columns (any order).
/// Malformed rows throw Error(Data) with the line number.
std::vector<WeatherRecord> parse_weather_csv(const std::string& text, const std::string& source = "weather");
std::vector<WeatherRecord> read_weather_csv(const std::filesystem::path& path);
std::string format_weather_csv(const std::vector<WeatherRecord>& records, double utc_offset_hours);

struct WeatherDays {
    std::vector<WeatherDay> days;  // may contain NaN for missing hours
    std::vector<std::string> warnings;
};

/// Groups reports into local days and encodes the m grid hours starting at
/// local clock hour grid_start_hour. Days missing more than
/// max_missing_fraction of their features are dropped with a warning.
WeatherDays group_weather_days(const std::vector<WeatherRecord>& records, double utc_offset_hours,
                               int grid_start_hour, std::size_t m, double max_missing_fraction = 0.2);

/// Per-feature medians of the training days, used to fill gaps.
struct WeatherImputer {
    std::vector<double> medians;  // m * p

    static WeatherImputer fit(const std::vector<WeatherDay>& days);
    /// Returns the number of values filled.
    std::size_t apply(WeatherDay& day) const;
};

}  // namespace pvsde
