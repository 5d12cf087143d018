#pragma once

#include <cstddef>
#include <vector>

#include "pvsde/timeutil.hpp"

namespace pvsde {

struct SiteConfig {
    double latitude = 22.13;     // degrees
    double longitude = 113.55;   // degrees
    double utc_offset = 8.0;     // hours
    double rated_power = 2.9;    // kW
    double elevation_cutoff = 5.0;  // degrees

    /// Throws Error(Config) when a field is out of range.
    void validate() const;
};

/// Raw telemetry on a regular grid. Missing samples are NaN.
struct RawPvSeries {
    UtcSeconds start_timestamp = 0;
    double step_seconds = 30.0;
    std::vector<double> values;  // kW

    UtcSeconds timestamp(std::size_t i) const {
        return start_timestamp + static_cast<UtcSeconds>(static_cast<double>(i) * step_seconds);
    }
};

/// Normalized power on a regular grid.
struct PvSeries {
    UtcSeconds start_timestamp = 0;
    double step_seconds = 30.0;
    std::vector<double> values;

    UtcSeconds timestamp(std::size_t i) const {
        return start_timestamp + static_cast<UtcSeconds>(static_cast<double>(i) * step_seconds);
    }
};

struct NormalizedPv {
    PvSeries series;
    std::vector<bool> mask;           // true = usable daytime sample
    std::size_t over_rating = 0;      // raw samples above 105% of rated power
};

/// Geometric solar elevation in degrees, without refraction (NOAA
/// low-accuracy algorithm: fractional-year declination, equation of time
/// and hour angle). Supported epoch 1950-2100.
double solar_elevation(const SiteConfig& site, UtcSeconds timestamp);

/// The factor cos(alpha) in P = P0 / (P_rate cos(alpha)). The angle is
/// taken as the solar zenith, so this is sin(elevation).
double sun_position_factor(double elevation_degrees);

/// Divides out rated power and sun position. Samples at or below the
/// elevation cutoff, and missing samples, are masked (value 0, mask false).
NormalizedPv normalize(const RawPvSeries& raw, const SiteConfig& site);

/// Inverse of normalize on unmasked samples; night samples map to 0 kW.
RawPvSeries denormalize(const PvSeries& series, const SiteConfig& site);

}  // namespace pvsde
