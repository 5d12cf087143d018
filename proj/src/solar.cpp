#include "pvsde/solar.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pvsde/error.hpp"

namespace pvsde {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kOverRatingTolerance = 0.05;

bool is_leap(int year) { return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0; }

}  // namespace

void SiteConfig::validate() const {
    require(latitude >= -90.0 && latitude <= 90.0, ErrorKind::Config,
            "latitude out of range: " + std::to_string(latitude));
    require(longitude >= -180.0 && longitude <= 180.0, ErrorKind::Config,
            "longitude out of range: " + std::to_string(longitude));
    require(rated_power > 0.0, ErrorKind::Config, "rated_power must be positive");
    require(elevation_cutoff > 0.0 && elevation_cutoff < 90.0, ErrorKind::Config,
            "elevation_cutoff must lie in (0, 90)");
    require(utc_offset >= -14.0 && utc_offset <= 14.0, ErrorKind::Config, "utc_offset out of range");
}

double solar_elevation(const SiteConfig& site, UtcSeconds timestamp) {
    require(site.latitude >= -90.0 && site.latitude <= 90.0 && site.longitude >= -180.0 &&
                site.longitude <= 180.0,
            ErrorKind::Config, "invalid site coordinates");
    const UtcDayTime dt = utc_day_time(timestamp);
    require(dt.year >= 1950 && dt.year <= 2100, ErrorKind::Data, "timestamp outside 1950-2100");

    const double hours = dt.seconds_of_day / 3600.0;
    const double days_in_year = is_leap(dt.year) ? 366.0 : 365.0;
    const double g = 2.0 * std::numbers::pi / days_in_year * (dt.day_of_year - 1 + (hours - 12.0) / 24.0);

    const double eqtime = 229.18 * (0.000075 + 0.001868 * std::cos(g) - 0.032077 * std::sin(g) -
                                    0.014615 * std::cos(2 * g) - 0.040849 * std::sin(2 * g));
    const double decl = 0.006918 - 0.399912 * std::cos(g) + 0.070257 * std::sin(g) -
                        0.006758 * std::cos(2 * g) + 0.000907 * std::sin(2 * g) -
                        0.002697 * std::cos(3 * g) + 0.00148 * std::sin(3 * g);

    // True solar time in minutes from UTC clock time.
    const double tst = dt.seconds_of_day / 60.0 + eqtime + 4.0 * site.longitude;
    const double hour_angle = (tst / 4.0 - 180.0) * kDeg;
    const double lat = site.latitude * kDeg;

    double cos_zenith = std::sin(lat) * std::sin(decl) + std::cos(lat) * std::cos(decl) * std::cos(hour_angle);
    cos_zenith = std::clamp(cos_zenith, -1.0, 1.0);
    return 90.0 - std::acos(cos_zenith) / kDeg;
}

double sun_position_factor(double elevation_degrees) { return std::sin(elevation_degrees * kDeg); }

NormalizedPv normalize(const RawPvSeries& raw, const SiteConfig& site) {
    site.validate();
    require(raw.step_seconds > 0.0, ErrorKind::Data, "step_seconds must be positive");
    NormalizedPv out;
    out.series.start_timestamp = raw.start_timestamp;
    out.series.step_seconds = raw.step_seconds;
    out.series.values.assign(raw.values.size(), 0.0);
    out.mask.assign(raw.values.size(), false);
    const double limit = site.rated_power * (1.0 + kOverRatingTolerance);
    for (std::size_t i = 0; i < raw.values.size(); ++i) {
        const double p0 = raw.values[i];
        if (!std::isfinite(p0)) continue;
        if (p0 > limit) ++out.over_rating;
        const double elevation = solar_elevation(site, raw.timestamp(i));
        if (elevation <= site.elevation_cutoff) continue;
        out.series.values[i] = std::max(0.0, p0 / (site.rated_power * sun_position_factor(elevation)));
        out.mask[i] = true;
    }
    return out;
}

RawPvSeries denormalize(const PvSeries& series, const SiteConfig& site) {
    site.validate();
    RawPvSeries out;
    out.start_timestamp = series.start_timestamp;
    out.step_seconds = series.step_seconds;
    out.values.resize(series.values.size());
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        const double factor = std::max(0.0, sun_position_factor(solar_elevation(site, series.timestamp(i))));
        out.values[i] = series.values[i] * site.rated_power * factor;
    }
    return out;
}

}  // namespace pvsde
