#include "pvsde/ensemble.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "pvsde/error.hpp"
#include "pvsde/parallel.hpp"
#include "pvsde/serialize.hpp"

namespace pvsde {

namespace {

constexpr double kAMin = 1e-4;
constexpr double kAMax = 2.0;

std::size_t slot_hour(std::size_t slot) { return slot / kParamsPerHour; }
std::size_t slot_param(std::size_t slot) { return slot % kParamsPerHour; }

std::string slot_file_name(std::size_t slot) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "slot_%03zu.json", slot);
    return buf;
}

/// Rows are raw day vectors; returns the scaled inputs seen by a slot.
Eigen::MatrixXd slot_inputs(const EnsembleModel& model, std::size_t slot, const Eigen::MatrixXd& raw_rows) {
    const Eigen::MatrixXd scaled = model.scaler.apply(raw_rows);
    if (!model.options.hour_local) return scaled;
    const auto p = static_cast<Eigen::Index>(model.p());
    return scaled.middleCols(static_cast<Eigen::Index>(slot_hour(slot)) * p, p);
}

ElmModel member_core(const EnsembleModel& model, std::size_t slot, std::size_t member) {
    Rng rng{model.options.seed, slot, member};
    return elm_init(static_cast<Eigen::Index>(model.input_dim()),
                    static_cast<Eigen::Index>(model.options.hidden), rng);
}

Eigen::MatrixXd day_matrix(const std::vector<WeatherDay>& days, std::size_t width) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(days.size()), static_cast<Eigen::Index>(width));
    for (std::size_t r = 0; r < days.size(); ++r) {
        require(days[r].features.size() == width, ErrorKind::Dimension,
                "weather day " + days[r].date + " has " + std::to_string(days[r].features.size()) +
                    " features, expected " + std::to_string(width));
        for (std::size_t k = 0; k < width; ++k)
            x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = days[r].features[k];
    }
    return x;
}

void check_schema(const EnsembleModel& model, const WeatherDay& day) {
    require(day.m == model.m && day.feature_names == model.feature_names, ErrorKind::Dimension,
            "weather day " + day.date + " does not match the model's feature schema");
}

}  // namespace

double param_value(const SdeParams& theta, std::size_t param) {
    switch (param) {
        case 0: return theta.a;
        case 1: return theta.b;
        case 2: return theta.beta;
        case 3: return theta.c;
        case 4: return theta.d;
    }
    throw Error(ErrorKind::Dimension, "parameter index out of range");
}

void set_param_value(SdeParams& theta, std::size_t param, double value) {
    switch (param) {
        case 0: theta.a = value; return;
        case 1: theta.b = value; return;
        case 2: theta.beta = value; return;
        case 3: theta.c = value; return;
        case 4: theta.d = value; return;
    }
    throw Error(ErrorKind::Dimension, "parameter index out of range");
}

std::string slot_label(std::size_t slot) {
    return "hour " + std::to_string(slot_hour(slot) + 1) + " " + kParamNames[slot_param(slot)];
}

void EnsembleOptions::validate() const {
    require(hidden >= 1, ErrorKind::Config, "hidden size K must be >= 1");
    require(members >= 1, ErrorKind::Config, "ensemble size M must be >= 1");
    require(trim_fraction >= 0.0 && trim_fraction < 0.5, ErrorKind::Config, "trim fraction must be in [0, 0.5)");
    require(ridge >= 0.0, ErrorKind::Config, "ridge must be non-negative");
    require(min_pairs >= 1, ErrorKind::Config, "min_pairs must be >= 1");
}

std::vector<std::size_t> bootstrap_indices(std::size_t n, Rng& rng) {
    require(n >= 1, ErrorKind::Data, "cannot resample an empty set");
    std::vector<std::size_t> idx(n);
    for (auto& i : idx) i = rng.index(n);
    return idx;
}

TrainSet bootstrap_resample(const TrainSet& data, Rng& rng) {
    const auto idx = bootstrap_indices(data.size(), rng);
    TrainSet out;
    out.inputs.resize(data.inputs.rows(), data.inputs.cols());
    out.targets.resize(data.targets.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
        const auto src = static_cast<Eigen::Index>(idx[r]);
        out.inputs.row(static_cast<Eigen::Index>(r)) = data.inputs.row(src);
        out.targets(static_cast<Eigen::Index>(r)) = data.targets(src);
    }
    return out;
}

double trimmed_mean(std::vector<double> values, double trim_fraction) {
    require(!values.empty(), ErrorKind::Data, "trimmed mean of no values");
    require(trim_fraction >= 0.0 && trim_fraction < 0.5, ErrorKind::Config, "trim fraction must be in [0, 0.5)");
    std::sort(values.begin(), values.end());
    const auto cut = static_cast<std::size_t>(std::floor(trim_fraction * static_cast<double>(values.size())));
    double sum = 0.0;
    for (std::size_t i = cut; i < values.size() - cut; ++i) sum += values[i];
    return sum / static_cast<double>(values.size() - 2 * cut);
}

EnsembleModel train_ensemble(const std::vector<TrainingPair>& pairs, const EnsembleOptions& options,
                             EnsembleTrainReport* report) {
    const auto t0 = std::chrono::steady_clock::now();
    options.validate();
    require(!pairs.empty(), ErrorKind::Training, "no training pairs");

    EnsembleModel model;
    model.options = options;
    model.m = pairs.front().weather.m;
    model.feature_names = pairs.front().weather.feature_names;
    require(model.m >= 1 && model.p() >= 1, ErrorKind::Dimension, "weather days must have m >= 1 and p >= 1");
    for (const auto& pair : pairs) {
        require(pair.weather.m == model.m && pair.weather.feature_names == model.feature_names, ErrorKind::Dimension,
                "weather day " + pair.weather.date + " has a different feature schema");
        require(pair.params.m() == model.m, ErrorKind::Dimension,
                "parameters for " + pair.weather.date + " have " + std::to_string(pair.params.m()) +
                    " hours, expected " + std::to_string(model.m));
        require(pair.flags.empty() || pair.flags.size() == model.m, ErrorKind::Dimension,
                "flags for " + pair.weather.date + " do not cover every hour");
    }
    auto dates = std::minmax_element(pairs.begin(), pairs.end(), [](const auto& x, const auto& y) {
        return x.weather.date < y.weather.date;
    });
    model.first_training_date = dates.first->weather.date;
    model.last_training_date = dates.second->weather.date;

    std::vector<WeatherDay> days;
    days.reserve(pairs.size());
    for (const auto& pair : pairs) days.push_back(pair.weather);
    const Eigen::MatrixXd raw = day_matrix(days, model.m * model.p());
    require(raw.allFinite(), ErrorKind::Data, "training weather contains non-finite values");
    model.scaler = FeatureScaler::fit(raw);

    const std::size_t n_slots = kParamsPerHour * model.m;
    std::vector<std::vector<Eigen::Index>> rows(n_slots);
    std::vector<TrainSet> sets(n_slots);
    std::vector<std::size_t> fallback;
    for (std::size_t s = 0; s < n_slots; ++s) {
        const std::size_t hour = slot_hour(s);
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            const auto& flags = pairs[k].flags;
            if (!flags.empty() && (flags[hour] & options.exclude_flags)) continue;
            rows[s].push_back(static_cast<Eigen::Index>(k));
        }
        if (rows[s].size() < options.min_pairs && pairs.size() >= options.min_pairs) {
            // Too few cleanly fitted hours (e.g. a dawn hour in winter):
            // train on the flagged values too rather than drop the slot.
            rows[s].resize(pairs.size());
            std::iota(rows[s].begin(), rows[s].end(), Eigen::Index{0});
            fallback.push_back(s);
        }
        require(rows[s].size() >= options.min_pairs, ErrorKind::Training,
                "slot " + std::to_string(s) + " (" + slot_label(s) + ") has " + std::to_string(rows[s].size()) +
                    " usable training pairs, needs " + std::to_string(options.min_pairs));
        const Eigen::MatrixXd inputs = slot_inputs(model, s, raw(rows[s], Eigen::all));
        sets[s].inputs = inputs;
        sets[s].targets.resize(static_cast<Eigen::Index>(rows[s].size()));
        for (std::size_t k = 0; k < rows[s].size(); ++k)
            sets[s].targets(static_cast<Eigen::Index>(k)) =
                param_value(pairs[static_cast<std::size_t>(rows[s][k])].params.hours[hour], slot_param(s));
    }

    const std::size_t members = options.members;
    model.slots.resize(n_slots);
    std::vector<Eigen::MatrixXd> fitted(n_slots);
    for (std::size_t s = 0; s < n_slots; ++s) {
        model.slots[s].n_pairs = rows[s].size();
        model.slots[s].output_weights.resize(static_cast<Eigen::Index>(members),
                                             static_cast<Eigen::Index>(options.hidden));
        fitted[s].resize(static_cast<Eigen::Index>(members), static_cast<Eigen::Index>(rows[s].size()));
    }

    parallel_for(n_slots * members, [&](std::size_t task) {
        const std::size_t s = task / members;
        const std::size_t r = task % members;
        Rng rng{options.seed, s, r};
        ElmModel elm = elm_init(static_cast<Eigen::Index>(model.input_dim()),
                                static_cast<Eigen::Index>(options.hidden), rng);
        const TrainSet resampled = bootstrap_resample(sets[s], rng);
        const ElmTrainResult trained = elm_train(std::move(elm), resampled, options.ridge, false);
        model.slots[s].output_weights.row(static_cast<Eigen::Index>(r)) = trained.model.output_weights.transpose();
        fitted[s].row(static_cast<Eigen::Index>(r)) = elm_predict(trained.model, sets[s].inputs).transpose();
    });

    EnsembleTrainReport local;
    local.fallback_slots = std::move(fallback);
    for (std::size_t s = 0; s < n_slots; ++s) {
        double sq = 0.0;
        for (Eigen::Index k = 0; k < fitted[s].cols(); ++k) {
            const Eigen::VectorXd col = fitted[s].col(k);
            const double pred = trimmed_mean(std::vector<double>(col.data(), col.data() + col.size()),
                                             options.trim_fraction);
            sq += (pred - sets[s].targets(k)) * (pred - sets[s].targets(k));
        }
        model.slots[s].train_rmse = std::sqrt(sq / static_cast<double>(fitted[s].cols()));
        local.slot_rmse.push_back(model.slots[s].train_rmse);
    }
    local.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (report) *report = std::move(local);
    return model;
}

ElmModel member_model(const EnsembleModel& model, std::size_t slot, std::size_t member) {
    require(slot < model.slots.size() && member < model.options.members, ErrorKind::Dimension,
            "slot or member index out of range");
    ElmModel elm = member_core(model, slot, member);
    elm.output_weights = model.slots[slot].output_weights.row(static_cast<Eigen::Index>(member)).transpose();
    if (!model.options.hour_local) {
        elm.scaler = model.scaler;
    } else {
        const auto p = static_cast<Eigen::Index>(model.p());
        const auto start = static_cast<Eigen::Index>(slot_hour(slot)) * p;
        elm.scaler.mean = model.scaler.mean.segment(start, p);
        elm.scaler.stddev = model.scaler.stddev.segment(start, p);
    }
    return elm;
}

Eigen::VectorXd slot_input(const EnsembleModel& model, std::size_t slot, const WeatherDay& day) {
    check_schema(model, day);
    const Eigen::Map<const Eigen::VectorXd> full(day.features.data(), static_cast<Eigen::Index>(day.features.size()));
    if (!model.options.hour_local) return full;
    const auto p = static_cast<Eigen::Index>(model.p());
    return full.segment(static_cast<Eigen::Index>(slot_hour(slot)) * p, p);
}

std::vector<double> member_outputs(const EnsembleModel& model, std::size_t slot, const WeatherDay& day) {
    const Eigen::VectorXd x = slot_input(model, slot, day);
    std::vector<double> out(model.options.members);
    for (std::size_t r = 0; r < out.size(); ++r) out[r] = elm_predict(member_model(model, slot, r), x);
    return out;
}

double predict_slot(const EnsembleModel& model, std::size_t slot, const WeatherDay& day) {
    return trimmed_mean(member_outputs(model, slot, day), model.options.trim_fraction);
}

SdeParams project_params(SdeParams theta, std::size_t hour, std::vector<ProjectionEvent>* events) {
    auto log = [&](std::string what) {
        if (events) events->push_back({hour, std::move(what)});
    };
    if (theta.c > theta.d) {
        std::swap(theta.c, theta.d);
        log("swapped inverted c and d");
    }
    // Tolerance keeps the rule idempotent under rounding of the widened gap.
    if (!(theta.d - theta.c >= kMinBoundGap * (1.0 - 1e-9))) {
        const double mid = 0.5 * (theta.c + theta.d);
        theta.c = mid - 0.5 * kMinBoundGap;
        theta.d = mid + 0.5 * kMinBoundGap;
        log("widened c..d gap to " + format_double(kMinBoundGap));
    }
    if (theta.b < theta.c || theta.b > theta.d) {
        theta.b = std::clamp(theta.b, theta.c, theta.d);
        log("clamped b into [c, d]");
    }
    if (theta.a < kAMin || theta.a > kAMax) {
        theta.a = std::clamp(theta.a, kAMin, kAMax);
        log("clamped a into [1e-4, 2]");
    }
    if (theta.beta < 0.0 || theta.beta > kBetaMax) {
        theta.beta = std::clamp(theta.beta, 0.0, kBetaMax);
        log("clamped beta into [0, 1]");
    }
    return theta;
}

std::vector<DayPrediction> predict_days(const EnsembleModel& model, const std::vector<WeatherDay>& days) {
    for (const auto& day : days) check_schema(model, day);
    const std::size_t n_slots = model.slots.size();
    const Eigen::MatrixXd raw = day_matrix(days, model.m * model.p());
    require(raw.allFinite(), ErrorKind::Data, "weather contains non-finite values");

    Eigen::MatrixXd slot_values(static_cast<Eigen::Index>(n_slots), static_cast<Eigen::Index>(days.size()));
    parallel_for(n_slots, [&](std::size_t s) {
        const Eigen::MatrixXd inputs = slot_inputs(model, s, raw);
        Eigen::MatrixXd outputs(static_cast<Eigen::Index>(model.options.members), inputs.rows());
        for (std::size_t r = 0; r < model.options.members; ++r) {
            ElmModel elm = member_core(model, s, r);
            elm.output_weights = model.slots[s].output_weights.row(static_cast<Eigen::Index>(r)).transpose();
            outputs.row(static_cast<Eigen::Index>(r)) = elm_predict(elm, inputs).transpose();
        }
        for (Eigen::Index k = 0; k < outputs.cols(); ++k) {
            const Eigen::VectorXd col = outputs.col(k);
            slot_values(static_cast<Eigen::Index>(s), k) =
                trimmed_mean(std::vector<double>(col.data(), col.data() + col.size()), model.options.trim_fraction);
        }
    });

    std::vector<DayPrediction> out(days.size());
    for (std::size_t k = 0; k < days.size(); ++k) {
        out[k].params.hours.resize(model.m);
        for (std::size_t hour = 0; hour < model.m; ++hour) {
            SdeParams theta;
            for (std::size_t j = 0; j < kParamsPerHour; ++j)
                set_param_value(theta, j,
                                slot_values(static_cast<Eigen::Index>(hour * kParamsPerHour + j),
                                            static_cast<Eigen::Index>(k)));
            out[k].params.hours[hour] = project_params(theta, hour, &out[k].events);
        }
    }
    return out;
}

DayPrediction predict_day_params(const EnsembleModel& model, const WeatherDay& day) {
    return predict_days(model, {day}).front();
}

void save_ensemble(const EnsembleModel& model, const std::filesystem::path& dir) {
    using nlohmann::json;
    json manifest;
    manifest["format_version"] = kEnsembleFormatVersion;
    manifest["hidden"] = model.options.hidden;
    manifest["members"] = model.options.members;
    manifest["trim_fraction"] = model.options.trim_fraction;
    manifest["ridge"] = model.options.ridge;
    manifest["hour_local"] = model.options.hour_local;
    manifest["seed"] = model.options.seed;
    manifest["min_pairs"] = model.options.min_pairs;
    manifest["exclude_flags"] = flag_names(model.options.exclude_flags);
    manifest["m"] = model.m;
    manifest["feature_names"] = model.feature_names;
    manifest["scaler"] = {{"mean", encode_vector(model.scaler.mean)}, {"stddev", encode_vector(model.scaler.stddev)}};
    manifest["training_dates"] = {{"first", model.first_training_date}, {"last", model.last_training_date}};
    json slots = json::array();
    for (std::size_t s = 0; s < model.slots.size(); ++s) {
        const auto& slot = model.slots[s];
        slots.push_back({{"slot", s},
                         {"label", slot_label(s)},
                         {"file", slot_file_name(s)},
                         {"n_pairs", slot.n_pairs},
                         {"train_rmse", slot.train_rmse}});
        json body;
        body["format_version"] = kEnsembleFormatVersion;
        body["slot"] = s;
        body["label"] = slot_label(s);
        body["members"] = slot.output_weights.rows();
        body["hidden"] = slot.output_weights.cols();
        body["output_weights"] = encode_matrix(slot.output_weights);
        write_file_atomic(dir / slot_file_name(s), body.dump() + "\n");
    }
    manifest["slots"] = std::move(slots);
    write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

EnsembleModel load_ensemble(const std::filesystem::path& dir) {
    using nlohmann::json;
    const auto manifest_path = dir / "manifest.json";
    require(std::filesystem::exists(manifest_path), ErrorKind::Io, "no manifest.json in " + dir.string());
    json manifest;
    try {
        manifest = json::parse(read_file(manifest_path));
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Data, manifest_path.string() + ": " + e.what());
    }
    require(manifest.value("format_version", 0) == kEnsembleFormatVersion, ErrorKind::Data,
            "unsupported ensemble format version");

    EnsembleModel model;
    try {
        model.options.hidden = manifest.at("hidden").get<std::size_t>();
        model.options.members = manifest.at("members").get<std::size_t>();
        model.options.trim_fraction = manifest.at("trim_fraction").get<double>();
        model.options.ridge = manifest.at("ridge").get<double>();
        model.options.hour_local = manifest.at("hour_local").get<bool>();
        model.options.seed = manifest.at("seed").get<std::uint64_t>();
        model.options.min_pairs = manifest.at("min_pairs").get<std::size_t>();
        model.options.exclude_flags = 0;
        for (const auto& name : manifest.at("exclude_flags")) model.options.exclude_flags |= parse_flag(name);
        model.m = manifest.at("m").get<std::size_t>();
        model.feature_names = manifest.at("feature_names").get<std::vector<std::string>>();
        const auto width = static_cast<Eigen::Index>(model.m * model.p());
        model.scaler.mean = decode_vector(manifest.at("scaler").at("mean").get<std::string>(), width);
        model.scaler.stddev = decode_vector(manifest.at("scaler").at("stddev").get<std::string>(), width);
        model.first_training_date = manifest.at("training_dates").at("first").get<std::string>();
        model.last_training_date = manifest.at("training_dates").at("last").get<std::string>();
        const auto& slots = manifest.at("slots");
        require(slots.size() == kParamsPerHour * model.m, ErrorKind::Data, "manifest slot count does not match 5 m");
        for (std::size_t s = 0; s < slots.size(); ++s) {
            EnsembleSlot slot;
            slot.n_pairs = slots[s].at("n_pairs").get<std::size_t>();
            slot.train_rmse = slots[s].at("train_rmse").get<double>();
            const auto path = dir / slots[s].at("file").get<std::string>();
            require(std::filesystem::exists(path), ErrorKind::Io, "missing slot file " + path.string());
            const json body = json::parse(read_file(path));
            require(body.at("slot").get<std::size_t>() == s, ErrorKind::Data, path.string() + ": slot index mismatch");
            slot.output_weights =
                decode_matrix(body.at("output_weights").get<std::string>(),
                              static_cast<Eigen::Index>(model.options.members),
                              static_cast<Eigen::Index>(model.options.hidden));
            model.slots.push_back(std::move(slot));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Data, dir.string() + ": malformed ensemble: " + e.what());
    }
    model.options.validate();
    return model;
}

}  // namespace pvsde
