#include "pvsde/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pvsde/error.hpp"

namespace pvsde {

namespace {

constexpr double kSolarConstant = 1361.0;  // W/m^2
constexpr double kClearSkyTransmittance = 0.75;

double sigmoid_of(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double round_to(double x, int decimals) {
    const double scale = std::pow(10.0, decimals);
    return std::round(x * scale) / scale;
}

nlohmann::json map_json(const BoundedMap& m) {
    nlohmann::json terms = nlohmann::json::array();
    const char* inputs[] = {"humidity", "wind_speed", "clearness"};
    for (std::size_t i = 0; i < 3; ++i)
        terms.push_back({{"input", inputs[i]},
                         {"weight", m.terms[i].weight},
                         {"gain", m.terms[i].gain},
                         {"center", m.terms[i].center}});
    return {{"lo", m.lo}, {"hi", m.hi}, {"terms", terms}};
}

/// Clearness index of an hour from its reported irradiance; dark hours
/// fall back to the day's latent value.
double clearness(double irradiance, double clear_sky, double fallback) {
    return clear_sky > 0.05 ? std::clamp(irradiance / clear_sky, 0.0, 1.2) : fallback;
}

SdeParams jitter_params(SdeParams p, Rng& rng) {
    p.a *= std::exp(0.05 * rng.normal());
    p.beta *= std::exp(0.05 * rng.normal());
    p.b += 0.01 * rng.normal();
    p.c = std::max(0.0, p.c + 0.01 * rng.normal());
    p.d += 0.01 * rng.normal();
    p.c = std::min(p.c, p.b);
    p.d = std::max(p.d, p.b);
    if (p.d - p.c < 0.01) p.d = p.c + 0.01;
    return p;
}

}  // namespace

double BoundedMap::operator()(double humidity, double wind_speed, double clearness) const {
    const double x[3] = {humidity, wind_speed, clearness};
    double s = 0.0;
    for (std::size_t i = 0; i < 3; ++i) s += terms[i].weight * sigmoid_of(terms[i].gain * (x[i] - terms[i].center));
    return lo + (hi - lo) * s;
}

TruthMap TruthMap::defaults() {
    TruthMap t;
    // Wind drives the reversion rate; humidity lowers the level and raises
    // the volatility; clear skies raise the level and narrow the range.
    t.a = {0.04, 0.34, {{{0.25, -0.12, 75.0}, {0.50, 0.45, 7.0}, {0.25, 6.0, 0.55}}}};
    t.b = {0.08, 0.86, {{{0.55, -0.18, 76.0}, {0.05, 0.30, 7.0}, {0.40, 7.0, 0.50}}}};
    t.beta = {0.02, 0.22, {{{0.55, 0.18, 72.0}, {0.10, 0.30, 7.0}, {0.35, -7.0, 0.55}}}};
    t.lower_width = {0.10, 0.45, {{{0.50, 0.15, 70.0}, {0.10, 0.30, 7.0}, {0.40, -6.0, 0.60}}}};
    t.upper_width = {0.03, 0.40, {{{0.50, 0.15, 70.0}, {0.10, 0.30, 7.0}, {0.40, -6.0, 0.60}}}};
    return t;
}

SdeParams TruthMap::operator()(double humidity, double wind_speed, double clearness) const {
    SdeParams p;
    p.a = a(humidity, wind_speed, clearness);
    p.b = b(humidity, wind_speed, clearness);
    p.beta = beta(humidity, wind_speed, clearness);
    p.c = std::max(0.0, p.b - lower_width(humidity, wind_speed, clearness));
    p.d = p.b + upper_width(humidity, wind_speed, clearness);
    return p;
}

nlohmann::json TruthMap::to_json() const {
    return {{"a", map_json(a)},
            {"b", map_json(b)},
            {"beta", map_json(beta)},
            {"lower_width", map_json(lower_width)},
            {"upper_width", map_json(upper_width)}};
}

const std::array<TypicalHour, 4> kTypicalHours{{
    {"clear", "2018-03-31", 10, 24.14, 11.298, "E", 57, 0.0, 6, 1004.4, 2.27, {0.3298, 0.8333, 0.0348, 0.6895, 0.8477}},
    {"cloudy", "2018-04-10", 10, 24.20, 7.044, "E", 75, 0.0, 6, 1003.7, 2.39, {0.2095, 0.5496, 0.1946, 0.1263, 0.9930}},
    {"rainy", "2018-05-08", 9, 23.27, 9.072, "NE", 98, 7.8, 9, 996.0, 0.02, {0.0760, 0.0519, 0.0519, 0.0, 0.3143}},
    {"overcast", "2018-04-14", 16, 25.85, 9.294, "S", 87, 0.0, 9, 996.6, 0.67, {0.0461, 0.3547, 0.1064, 0.2267, 0.6209}},
}};

double clear_sky_irradiance(const SiteConfig& site, UtcSeconds hour_start) {
    const double elev = solar_elevation(site, hour_start + 1800);
    return kSolarConstant * kClearSkyTransmittance * std::max(0.0, std::sin(elev * std::numbers::pi / 180.0)) *
           3600.0 / 1e6;
}

SyntheticSpec SyntheticSpec::from_config(const RunConfig& config) {
    SyntheticSpec spec;
    spec.settings = config.synth;
    spec.site = config.site;
    spec.step_seconds = config.step_seconds;
    spec.substeps = config.substeps;
    spec.seed = stream_seed(config.seed, SeedStream::Synth);
    return spec;
}

nlohmann::json SyntheticSpec::to_json() const {
    return {{"days", settings.days},
            {"start_date", settings.start_date},
            {"regime_days", settings.regime_days},
            {"param_noise", settings.param_noise},
            {"step_seconds", step_seconds},
            {"substeps", substeps},
            {"seed", seed},
            {"site",
             {{"latitude", site.latitude},
              {"longitude", site.longitude},
              {"utc_offset", site.utc_offset},
              {"rated_power", site.rated_power},
              {"elevation_cutoff", site.elevation_cutoff}}},
            {"map", map.to_json()}};
}

std::vector<WeatherRecord> typical_day_weather(const TypicalHour& typical, const std::string& date,
                                               const SiteConfig& site, Rng* rng) {
    const double ref = clear_sky_irradiance(site, local_midnight(typical.date, site.utc_offset) + typical.hour * 3600);
    const double k_ref = ref > 0.0 ? std::min(typical.irradiance / ref, 1.2) : 0.0;
    const double direction = *parse_wind_direction(typical.wind_direction);
    auto noise = [&](double sd) { return rng ? sd * rng->normal() : 0.0; };
    std::vector<WeatherRecord> out;
    const UtcSeconds midnight = local_midnight(date, site.utc_offset);
    for (int hr = 0; hr < 24; ++hr) {
        WeatherRecord r;
        r.timestamp = midnight + hr * 3600;
        r.temperature = round_to(typical.temperature + noise(0.3), 2);
        r.humidity = std::clamp(round_to(typical.humidity + noise(1.5), 0), 0.0, 100.0);
        r.pressure = round_to(typical.pressure + noise(0.3), 1);
        r.precipitation = round_to(typical.precipitation * (rng ? 0.8 + 0.4 * rng->uniform() : 1.0), 1);
        r.wind_speed = std::max(0.0, round_to(typical.wind_speed + noise(0.4), 3));
        r.wind_direction = direction;
        r.cloud_okta = typical.cloud_okta;
        r.irradiance = std::max(0.0, round_to(k_ref * clear_sky_irradiance(site, r.timestamp) * (1.0 + noise(0.03)), 3));
        out.push_back(r);
    }
    return out;
}

SyntheticDataset synth_generate(const SyntheticSpec& spec) {
    spec.site.validate();
    SimulationOptions sim;
    sim.step_seconds = spec.step_seconds;
    sim.substeps = spec.substeps;
    sim.validate();
    const std::size_t total = spec.settings.days + spec.settings.regime_days;
    require(total >= 1, ErrorKind::Config, "synthetic dataset needs at least one day");
    require(spec.settings.param_noise >= 0.0, ErrorKind::Config, "param_noise must be non-negative");

    SyntheticDataset ds;
    ds.truth.grid_start_hour = 0;
    ds.truth.m = 24;
    ds.truth.step_seconds = spec.step_seconds;
    ds.pv.step_seconds = spec.step_seconds;
    ds.pv.start_timestamp = local_midnight(spec.settings.start_date, spec.site.utc_offset);
    const std::size_t per_day = 24 * sim.steps_per_hour();
    ds.pv.values.reserve(total * per_day);

    for (std::size_t j = 0; j < total; ++j) {
        Rng rng{spec.seed, j};
        const std::string date = add_days(spec.settings.start_date, static_cast<int>(j));
        const UtcSeconds midnight = local_midnight(date, spec.site.utc_offset);
        DayParams params;
        std::vector<WeatherRecord> weather;

        if (j < spec.settings.days) {
            const int doy = utc_day_time(midnight + 43200).day_of_year;
            const double season = std::cos(2.0 * std::numbers::pi * (doy - 196) / 365.25);
            const double h0 = 45.0 + 52.0 * rng.uniform();
            const double v0 = 1.0 + 12.0 * rng.uniform();
            const double k0 = std::clamp(0.97 - 0.85 * sigmoid_of((h0 - 80.0) / 5.0) + 0.08 * rng.normal(), 0.03, 1.0);
            const double theta0 = 360.0 * rng.uniform();
            for (int hr = 0; hr < 24; ++hr) {
                WeatherRecord r;
                r.timestamp = midnight + hr * 3600;
                const double shape = std::max(0.0, std::sin(std::numbers::pi * (hr + 0.5 - 6.0) / 12.0));
                const double sky = clear_sky_irradiance(spec.site, r.timestamp);
                const double k = std::clamp(k0 + 0.04 * rng.normal(), 0.02, 1.0);
                r.humidity = std::clamp(round_to(h0 - 8.0 * shape + 2.0 * rng.normal(), 0), 15.0, 100.0);
                r.wind_speed = std::max(0.0, round_to(v0 + 1.2 * shape + 0.7 * rng.normal(), 3));
                r.irradiance = round_to(k * sky, 3);
                r.temperature = round_to(23.0 + 5.0 * season + 3.0 * shape - 2.0 * (1.0 - k0) + 0.4 * rng.normal(), 2);
                r.pressure = round_to(1009.0 - 6.0 * season + 0.8 * rng.normal(), 1);
                const double u = rng.uniform();
                r.precipitation = r.humidity > 92.0 && u < 0.5 ? round_to(-1.5 * std::log(1.0 - rng.uniform()), 1) : 0.0;
                r.cloud_okta = std::clamp(std::round(9.0 * (1.0 - k) + 0.6 * rng.normal()), 0.0, 9.0);
                r.wind_direction = 22.5 * std::round(std::fmod(theta0 + 15.0 * rng.normal() + 720.0, 360.0) / 22.5);
                if (r.wind_direction >= 360.0) r.wind_direction -= 360.0;

                SdeParams p = spec.map(r.humidity, r.wind_speed, clearness(r.irradiance, sky, k0));
                if (spec.settings.param_noise > 0.0) {
                    const double n = spec.settings.param_noise;
                    const double lower = (p.b - p.c) * std::exp(n * rng.normal());
                    const double upper = (p.d - p.b) * std::exp(n * rng.normal());
                    p.a = std::clamp(p.a * std::exp(n * rng.normal()), spec.map.a.lo, spec.map.a.hi);
                    p.beta = std::clamp(p.beta * std::exp(n * rng.normal()), spec.map.beta.lo, spec.map.beta.hi);
                    p.b = std::clamp(p.b + 0.1 * n * rng.normal(), spec.map.b.lo, spec.map.b.hi);
                    p.c = std::max(0.0, p.b - lower);
                    p.d = p.b + upper;
                }
                params.hours.push_back(p);
                weather.push_back(r);
            }
        } else {
            const TypicalHour& typical = kTypicalHours[(j - spec.settings.days) % kTypicalHours.size()];
            weather = typical_day_weather(typical, date, spec.site, &rng);
            for (int hr = 0; hr < 24; ++hr) params.hours.push_back(jitter_params(typical.params, rng));
            ds.regime_dates.push_back(date);
        }

        params.validate();
        const double p0 = stationary_sample(params.hours.front(), rng);
        const std::vector<double> path = simulate_day(params, p0, rng, sim);
        PvSeries normalized;
        normalized.start_timestamp = midnight;
        normalized.step_seconds = spec.step_seconds;
        // simulate_day excludes p0; sample k sits at midnight + k * step.
        normalized.values = path;
        const RawPvSeries raw = denormalize(normalized, spec.site);
        ds.pv.values.insert(ds.pv.values.end(), raw.values.begin(), raw.values.end());

        ds.truth.days[date] = std::move(params);
        ds.weather.insert(ds.weather.end(), weather.begin(), weather.end());
    }
    return ds;
}

}  // namespace pvsde
