#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pvsde/elm.hpp"
#include "pvsde/estimation.hpp"
#include "pvsde/jacobi.hpp"
#include "pvsde/rng.hpp"

namespace pvsde {

/// Encoded weather report for the daytime hours of one day, hour-major:
/// features[i * p + j] is feature j of hour i.
struct WeatherDay {
    std::string date;
    std::size_t m = 0;
    std::vector<std::string> feature_names;  // the p per-hour names
    std::vector<double> features;            // m * p

    std::size_t p() const { return feature_names.size(); }
};

inline constexpr std::array<const char*, 5> kParamNames{"a", "b", "beta", "c", "d"};
inline constexpr std::size_t kParamsPerHour = 5;

double param_value(const SdeParams& theta, std::size_t param);
void set_param_value(SdeParams& theta, std::size_t param, double value);

/// "hour 3 beta" style label for slot = hour * 5 + param.
std::string slot_label(std::size_t slot);

/// One training day: weather, identified parameters and the per-hour fit
/// flags. Hours whose flags intersect EnsembleOptions::exclude_flags are
/// normally left out of that hour's slots.
struct TrainingPair {
    WeatherDay weather;
    DayParams params;
    std::vector<std::uint32_t> flags;  // empty means all hours usable
};

struct EnsembleOptions {
    std::size_t hidden = 100;     // K
    std::size_t members = 200;    // M
    double trim_fraction = 0.2;
    double ridge = 1e-8;
    /// Feed each hour's slots only that hour's p features instead of the
    /// full m * p day vector.
    bool hour_local = false;
    std::uint64_t seed = 0;
    std::size_t min_pairs = 10;
    std::uint32_t exclude_flags = kInterpolated;

    void validate() const;
};

struct EnsembleSlot {
    std::size_t n_pairs = 0;
    double train_rmse = 0.0;  // trimmed-mean prediction vs targets, training days
    /// M x K output weights; row r belongs to member r.
    Eigen::MatrixXd output_weights;
};

/// Bagged ELM mapping from a day's weather vector to its 5 m hourly
/// parameters. Member r of slot s has input weights and biases drawn from
/// Rng{seed, s, r}; only the output weights are stored, the frozen random
/// layer is regenerated on demand.
struct EnsembleModel {
    EnsembleOptions options;
    std::size_t m = 0;
    std::vector<std::string> feature_names;
    FeatureScaler scaler;  // over the full m * p vector, shared by all slots
    std::vector<EnsembleSlot> slots;
    std::string first_training_date;
    std::string last_training_date;

    std::size_t p() const { return feature_names.size(); }
    std::size_t input_dim() const { return options.hour_local ? p() : m * p(); }
    std::size_t n_models() const { return slots.size() * options.members; }
};

struct EnsembleTrainReport {
    double seconds = 0.0;
    std::vector<double> slot_rmse;
    /// Slots that had fewer than min_pairs unflagged pairs and were trained
    /// on every pair instead.
    std::vector<std::size_t> fallback_slots;
};

/// Same-size resample drawn uniformly with replacement.
TrainSet bootstrap_resample(const TrainSet& data, Rng& rng);
std::vector<std::size_t> bootstrap_indices(std::size_t n, Rng& rng);

/// Sorts, drops floor(trim_fraction * n) values from each end and averages
/// the rest.
double trimmed_mean(std::vector<double> values, double trim_fraction);

/// Flagged hours are left out of a slot unless that would leave it with
/// fewer than options.min_pairs pairs, in which case the slot uses every
/// pair and is listed in report->fallback_slots. Throws Error(Training)
/// when there are fewer than min_pairs pairs in total.
EnsembleModel train_ensemble(const std::vector<TrainingPair>& pairs, const EnsembleOptions& options,
                             EnsembleTrainReport* report = nullptr);

/// Member r of a slot as a standalone ELM (scaler included), so that
/// elm_predict on the slot's raw input reproduces the member's output.
ElmModel member_model(const EnsembleModel& model, std::size_t slot, std::size_t member);

/// The slot's raw input for one day (full day vector or one hour's slice).
Eigen::VectorXd slot_input(const EnsembleModel& model, std::size_t slot, const WeatherDay& day);

std::vector<double> member_outputs(const EnsembleModel& model, std::size_t slot, const WeatherDay& day);
double predict_slot(const EnsembleModel& model, std::size_t slot, const WeatherDay& day);

struct ProjectionEvent {
    std::size_t hour = 0;
    std::string what;
};

inline constexpr double kMinBoundGap = 0.01;
inline constexpr double kBetaMax = 1.0;

/// Makes one hour's parameters valid: orders c < d, widens the gap to at
/// least kMinBoundGap around its midpoint, clamps b into [c, d], a into
/// [1e-4, 2] and beta into [0, kBetaMax]. Idempotent.
SdeParams project_params(SdeParams theta, std::size_t hour = 0, std::vector<ProjectionEvent>* events = nullptr);

struct DayPrediction {
    DayParams params;
    std::vector<ProjectionEvent> events;
};

DayPrediction predict_day_params(const EnsembleModel& model, const WeatherDay& day);

/// Batched prediction, parallel over slots.
std::vector<DayPrediction> predict_days(const EnsembleModel& model, const std::vector<WeatherDay>& days);

/// Directory with manifest.json and one slot_NN.json per slot.
void save_ensemble(const EnsembleModel& model, const std::filesystem::path& dir);
EnsembleModel load_ensemble(const std::filesystem::path& dir);

inline constexpr int kEnsembleFormatVersion = 1;

}  // namespace pvsde
