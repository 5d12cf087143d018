#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pvsde/ensemble.hpp"
#include "pvsde/jacobi.hpp"
#include "pvsde/timeutil.hpp"

namespace pvsde {

/// Hourly parameters keyed by local date, plus the hour grid they refer
/// to. Serialized as a JSON object whose date keys map to arrays of m
/// {a, b, beta, c, d, flags} objects; keys starting with '_' carry the
/// grid ("_meta") and prediction projection logs ("_projections").
struct ParamsDocument {
    int grid_start_hour = 0;
    std::size_t m = 0;
    double step_seconds = 30.0;
    std::map<std::string, DayParams> days;
    std::map<std::string, std::vector<std::uint32_t>> flags;
    std::map<std::string, std::vector<ProjectionEvent>> projections;
};

nlohmann::json params_to_json(const ParamsDocument& doc);
ParamsDocument params_from_json(const nlohmann::json& j);
void write_params(const std::filesystem::path& path, const ParamsDocument& doc);
ParamsDocument read_params(const std::filesystem::path& path);

/// Everything needed to regenerate a fan exactly.
struct FanMeta {
    std::string date;
    UtcSeconds start = 0;
    int grid_start_hour = 0;
    double step_seconds = 30.0;
    int substeps = 10;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
    std::optional<double> p0;
    std::vector<double> levels = kDefaultFanLevels;
    DayParams params;

    SimulationOptions simulation_options() const;
};

nlohmann::json fan_meta_to_json(const FanMeta& meta);
FanMeta fan_meta_from_json(const nlohmann::json& j);

/// Column name of a quantile level: 0.05 -> "q05", 0.5 -> "q50".
std::string quantile_column(double level);

/// `step,timestamp,mean,q05,...` with one row per output step.
std::string format_fan_csv(const SimulationFan& fan, const FanMeta& meta, double utc_offset_hours);

/// Writes fan_<date>.csv and fan_<date>.meta.json into dir.
void write_fan(const std::filesystem::path& dir, const SimulationFan& fan, const FanMeta& meta,
               double utc_offset_hours);

/// Meta files in a directory (sorted by date), or a single meta file.
std::vector<FanMeta> read_fan_metas(const std::filesystem::path& path);

/// Re-runs the simulation recorded in a meta file.
SimulationFan regenerate_fan(const FanMeta& meta);

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace pvsde
