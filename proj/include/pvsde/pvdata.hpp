#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "pvsde/solar.hpp"

namespace pvsde {

inline constexpr const char* kPvCsvHeader = "timestamp,power_kw";

/// Reads `timestamp,power_kw` rows onto a regular grid of step_seconds
/// (which must divide 3600). Absent rows and empty values become NaN.
/// Timestamps off the grid or out of order throw Error(Data) with the line.
RawPvSeries parse_pv_csv(const std::string& text, double step_seconds, const std::string& source = "pv");
RawPvSeries read_pv_csv(const std::filesystem::path& path, double step_seconds);
std::string format_pv_csv(const RawPvSeries& series, double utc_offset_hours);

/// The m-hour daytime window of one local date, cut from a normalized series.
struct DayWindow {
    std::string date;
    UtcSeconds start = 0;
    std::vector<double> values;
    std::vector<bool> mask;
};

/// Local dates covered by the series, in order.
std::vector<std::string> series_dates(const PvSeries& series, double utc_offset_hours);

/// Window of m hours from local clock hour grid_start_hour. Steps outside
/// the series are masked.
DayWindow day_window(const NormalizedPv& pv, const std::string& date, double utc_offset_hours, int grid_start_hour,
                     std::size_t m);

/// Start hour of the m consecutive local clock hours holding the most
/// unmasked samples over the whole series (earliest on ties).
int select_hour_grid(const NormalizedPv& pv, double utc_offset_hours, std::size_t m);

}  // namespace pvsde
