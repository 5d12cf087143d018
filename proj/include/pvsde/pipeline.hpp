#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pvsde/artifacts.hpp"
#include "pvsde/config.hpp"
#include "pvsde/ensemble.hpp"
#include "pvsde/metrics.hpp"
#include "pvsde/pvdata.hpp"
#include "pvsde/weather.hpp"

namespace pvsde {

/// What a command wrote and anything worth telling the user. The summary
/// is printed by the CLI as JSON.
struct CommandResult {
    std::vector<std::filesystem::path> outputs;
    std::vector<std::string> warnings;
    nlohmann::json summary = nlohmann::json::object();
};

/// Hour grid, imputation medians and site of a trained model, stored next
/// to the ensemble as weather_schema.json.
struct WeatherSchema {
    int grid_start_hour = 0;
    std::size_t m = 0;
    double step_seconds = 30.0;
    double utc_offset = 8.0;
    std::vector<std::string> feature_names;
    WeatherImputer imputer;

    nlohmann::json to_json() const;
    static WeatherSchema from_json(const nlohmann::json& j);
};

/// Identifies every local date of a normalized series on the given grid.
/// Days where no hour can be fitted are skipped with a warning.
ParamsDocument identify_series(const NormalizedPv& pv, const RunConfig& config, int grid_start_hour,
                               std::vector<std::string>* warnings = nullptr);

/// Seeded shuffle split; returns (train, test), each sorted.
std::pair<std::vector<std::string>, std::vector<std::string>> split_dates(std::vector<std::string> dates,
                                                                          double fraction, std::uint64_t seed);

/// Historical fan: one path per training day window. Masked samples are
/// replaced by the per-step median of the unmasked ones.
SimulationFan climatology_fan(const std::vector<DayWindow>& training_days, double step_seconds,
                              const std::vector<double>& levels = kDefaultFanLevels);

/// Pairs identified parameters with imputed weather for the given dates.
std::vector<TrainingPair> training_pairs(const ParamsDocument& params, const std::vector<WeatherDay>& weather,
                                         const std::vector<std::string>& dates);

/// yyyymmdd as an integer, used to key per-date random streams.
std::uint64_t date_key(const std::string& date);

CommandResult cmd_identify(const RunConfig& config, const std::filesystem::path& out_dir);
CommandResult cmd_train(const RunConfig& config, const std::filesystem::path& out_dir);
CommandResult cmd_predict(const RunConfig& config, const std::filesystem::path& out_dir);
CommandResult cmd_simulate(const RunConfig& config, const std::filesystem::path& out_dir);
CommandResult cmd_evaluate(const RunConfig& config, const std::filesystem::path& out_dir);
CommandResult cmd_synth(const RunConfig& config, const std::filesystem::path& out_dir);
CommandResult cmd_e2e(const RunConfig& config, const std::filesystem::path& out_dir);

/// Dispatches by name ("identify", "train", ...).
CommandResult run_command(const std::string& name, const RunConfig& config, const std::filesystem::path& out_dir);

}  // namespace pvsde
