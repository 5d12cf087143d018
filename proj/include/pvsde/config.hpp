#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "pvsde/ensemble.hpp"
#include "pvsde/estimation.hpp"
#include "pvsde/metrics.hpp"
#include "pvsde/solar.hpp"

namespace pvsde {

/// Settings of the synthetic data generator.
struct SynthSettings {
    std::size_t days = 400;
    std::string start_date = "2019-01-01";
    /// Extra days whose weather and parameters follow the four typical
    /// hours (clear, cloudy, rainy, overcast) instead of the smooth map.
    std::size_t regime_days = 0;
    /// Relative day-level jitter of the true parameters that the weather
    /// does not explain.
    double param_noise = 0.0;
};

/// Everything a command needs. Relative input paths are resolved against
/// the directory of the config file.
struct RunConfig {
    SiteConfig site;
    std::size_t m = 12;
    std::optional<int> grid_start_hour;  // local clock hour; absent = auto
    std::uint64_t seed = 0;
    double split = 0.70;
    std::size_t paths = 1000;
    double step_seconds = 30.0;
    int substeps = 10;
    double max_missing_fraction = 0.20;

    EnsembleOptions ensemble;  // seed is derived from `seed`
    EstimationOptions estimation;
    MetricOptions metrics;
    SynthSettings synth;

    std::filesystem::path pv;
    std::filesystem::path weather;
    std::filesystem::path params;
    std::filesystem::path model;
    std::filesystem::path fan;
    std::filesystem::path dataset;

    void validate() const;
};

/// Parses `key = value` lines; `#` and `;` start comments and `[section]`
/// headers prefix the following keys with `section.`. Unknown keys and bad
/// values throw Error(Config).
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Sets one key as if it appeared in a config file. Paths are taken as
/// given and the result is not validated.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);

/// Flat key/value view of a config, as accepted by parse_config.
std::map<std::string, std::string> config_entries(const RunConfig& config);

/// Subsystem seeds derived from the master seed.
enum class SeedStream : std::uint64_t { Ensemble = 1, Split = 2, Fan = 3, Synth = 4, Baseline = 5 };
std::uint64_t stream_seed(std::uint64_t master, SeedStream stream, std::uint64_t extra = 0);

}  // namespace pvsde
