#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "pvsde/artifacts.hpp"
#include "pvsde/config.hpp"
#include "pvsde/jacobi.hpp"
#include "pvsde/solar.hpp"
#include "pvsde/weather.hpp"

namespace pvsde {

/// weight * sigmoid(gain * (x - center)).
struct SigmoidTerm {
    double weight = 0.0;
    double gain = 0.0;
    double center = 0.0;
};

/// lo + (hi - lo) * sum of three sigmoid terms of (humidity %, wind speed
/// m/s, clearness index), with weights summing to 1, so the value stays
/// inside [lo, hi].
struct BoundedMap {
    double lo = 0.0;
    double hi = 1.0;
    std::array<SigmoidTerm, 3> terms{};

    double operator()(double humidity, double wind_speed, double clearness) const;
};

/// Ground-truth weather-to-parameter map of the synthetic data. The bounds
/// are built as c = max(0, b - lower_width) and d = b + upper_width, so
/// every output satisfies c <= b <= d and c < d by construction.
struct TruthMap {
    BoundedMap a;
    BoundedMap b;
    BoundedMap beta;
    BoundedMap lower_width;
    BoundedMap upper_width;

    static TruthMap defaults();
    SdeParams operator()(double humidity, double wind_speed, double clearness) const;
    nlohmann::json to_json() const;
};

/// A typical hour of the four weather regimes (clear, partly cloudy, rainy,
/// overcast): its weather report and identified parameters.
struct TypicalHour {
    const char* name;
    const char* date;
    int hour;  // local start hour
    double temperature;
    double wind_speed;
    const char* wind_direction;
    double humidity;
    double precipitation;
    double cloud_okta;
    double pressure;
    double irradiance;
    SdeParams params;
};

extern const std::array<TypicalHour, 4> kTypicalHours;

/// Hourly clear-sky irradiance in MJ/m^2 for the hour starting at t, from
/// the solar elevation at mid-hour (transmittance 0.75).
double clear_sky_irradiance(const SiteConfig& site, UtcSeconds hour_start);

struct SyntheticSpec {
    SynthSettings settings;
    TruthMap map = TruthMap::defaults();
    SiteConfig site;
    double step_seconds = 30.0;
    int substeps = 10;
    std::uint64_t seed = 0;

    static SyntheticSpec from_config(const RunConfig& config);
    nlohmann::json to_json() const;
};

struct SyntheticDataset {
    std::vector<WeatherRecord> weather;  // 24 reports per day
    RawPvSeries pv;                      // whole days, kW, zero at night
    ParamsDocument truth;                // all 24 local hours (grid start 0, m = 24)
    std::vector<std::string> regime_dates;
};

/// Deterministic under spec.seed.
SyntheticDataset synth_generate(const SyntheticSpec& spec);

/// 24 hourly reports for `date` whose daylight hours repeat a typical
/// hour's weather (irradiance rescaled by the clear-sky curve of each
/// hour). Jitter is applied only when rng is given.
std::vector<WeatherRecord> typical_day_weather(const TypicalHour& typical, const std::string& date,
                                               const SiteConfig& site, Rng* rng = nullptr);

}  // namespace pvsde
