#include "pvsde/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <set>

#include "pvsde/error.hpp"
#include "pvsde/parallel.hpp"
#include "pvsde/serialize.hpp"
#include "pvsde/synth.hpp"

namespace pvsde {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void require_input(const std::filesystem::path& p, const char* key) {
    require(!p.empty(), ErrorKind::Config, std::string("config key '") + key + "' is required for this command");
    require(std::filesystem::exists(p), ErrorKind::Io, std::string(key) + ": no such file or directory: " + p.string());
}

NormalizedPv load_normalized_pv(const std::filesystem::path& path, const RunConfig& config) {
    return normalize(read_pv_csv(path, config.step_seconds), config.site);
}

std::map<std::string, WeatherDay> by_date(const std::vector<WeatherDay>& days) {
    std::map<std::string, WeatherDay> out;
    for (const auto& d : days) out[d.date] = d;
    return out;
}

struct TrainedModel {
    EnsembleModel ensemble;
    WeatherSchema schema;
    EnsembleTrainReport report;
};

TrainedModel train_model(const ParamsDocument& params, std::vector<WeatherDay> weather,
                         const std::vector<std::string>& dates, const RunConfig& config) {
    const std::set<std::string> wanted(dates.begin(), dates.end());
    std::vector<WeatherDay> training_weather;
    for (const auto& d : weather)
        if (wanted.count(d.date)) training_weather.push_back(d);
    require(!training_weather.empty(), ErrorKind::Training, "no training days have both weather and parameters");

    TrainedModel out;
    out.schema.grid_start_hour = params.grid_start_hour;
    out.schema.m = params.m;
    out.schema.step_seconds = params.step_seconds;
    out.schema.utc_offset = config.site.utc_offset;
    out.schema.feature_names = weather_feature_names();
    out.schema.imputer = WeatherImputer::fit(training_weather);
    for (auto& d : weather) out.schema.imputer.apply(d);

    EnsembleOptions options = config.ensemble;
    options.seed = stream_seed(config.seed, SeedStream::Ensemble);
    out.ensemble = train_ensemble(training_pairs(params, weather, dates), options, &out.report);
    return out;
}

nlohmann::json train_report_json(const TrainedModel& trained) {
    nlohmann::json slots = nlohmann::json::array();
    const auto& fallback = trained.report.fallback_slots;
    for (std::size_t s = 0; s < trained.ensemble.slots.size(); ++s)
        slots.push_back({{"slot", s},
                         {"label", slot_label(s)},
                         {"n_pairs", trained.ensemble.slots[s].n_pairs},
                         {"includes_flagged_hours", std::find(fallback.begin(), fallback.end(), s) != fallback.end()},
                         {"train_rmse", trained.ensemble.slots[s].train_rmse}});
    return {{"models", trained.ensemble.n_models()},
            {"hidden", trained.ensemble.options.hidden},
            {"members", trained.ensemble.options.members},
            {"first_training_date", trained.ensemble.first_training_date},
            {"last_training_date", trained.ensemble.last_training_date},
            {"slots", slots}};
}

void note_fallback(const EnsembleTrainReport& report, std::vector<std::string>& warnings) {
    for (std::size_t s : report.fallback_slots)
        warnings.push_back("slot " + std::to_string(s) + " (" + slot_label(s) +
                           ") had too few cleanly fitted hours and was trained on flagged hours too");
}

MetricReport mean_report(const std::vector<MetricReport>& reports) {
    MetricReport m;
    if (reports.empty()) return m;
    double acf = 0.0;
    std::size_t n_acf = 0;
    for (const auto& r : reports) {
        m.picp90 += r.picp90;
        m.kl += r.kl;
        m.risk50 += r.risk50;
        m.risk90 += r.risk90;
        m.nd += r.nd;
        m.nrmse += r.nrmse;
        m.n_samples += r.n_samples;
        if (r.acf_mismatch) {
            acf += *r.acf_mismatch;
            ++n_acf;
        }
    }
    const double n = static_cast<double>(reports.size());
    m.picp90 /= n;
    m.kl /= n;
    m.risk50 /= n;
    m.risk90 /= n;
    m.nd /= n;
    m.nrmse /= n;
    if (n_acf) m.acf_mismatch = acf / static_cast<double>(n_acf);
    return m;
}

FanMeta fan_meta_for(const std::string& date, const DayParams& params, int grid_start_hour, const RunConfig& config) {
    FanMeta meta;
    meta.date = date;
    meta.start = local_midnight(date, config.site.utc_offset) + static_cast<UtcSeconds>(grid_start_hour) * 3600;
    meta.grid_start_hour = grid_start_hour;
    meta.step_seconds = config.step_seconds;
    meta.substeps = config.substeps;
    meta.n_paths = config.paths;
    meta.seed = stream_seed(config.seed, SeedStream::Fan, date_key(date));
    meta.params = params;
    return meta;
}

/// Relative RMSE per slot: sqrt(mean e^2) / sqrt(mean target^2) over the
/// days whose target hour is usable.
struct MappingError {
    std::vector<double> slot_relative;  // 5 m entries, NaN when a slot has no usable day
    double mean_relative = 0.0;
    std::array<double, kParamsPerHour> param_relative{};
    double pooled_relative = 0.0;
};

MappingError mapping_error(const std::map<std::string, DayParams>& predicted,
                           const std::map<std::string, DayParams>& target, std::size_t target_offset, std::size_t m,
                           const std::map<std::string, std::vector<std::uint32_t>>* flags, std::uint32_t exclude) {
    MappingError out;
    out.slot_relative.assign(kParamsPerHour * m, std::nan(""));
    std::array<double, kParamsPerHour> param_sum{};
    std::array<std::size_t, kParamsPerHour> param_n{};
    double pooled_e = 0.0, pooled_t = 0.0, slot_sum = 0.0;
    std::size_t slot_n = 0;
    for (std::size_t s = 0; s < kParamsPerHour * m; ++s) {
        const std::size_t hour = s / kParamsPerHour, param = s % kParamsPerHour;
        double se = 0.0, st = 0.0;
        std::size_t n = 0;
        for (const auto& [date, pred] : predicted) {
            const auto t = target.find(date);
            if (t == target.end()) continue;
            if (flags) {
                const auto f = flags->find(date);
                if (f != flags->end() && (f->second.at(hour) & exclude)) continue;
            }
            const double y = param_value(t->second.hours.at(target_offset + hour), param);
            const double e = param_value(pred.hours.at(hour), param) - y;
            se += e * e;
            st += y * y;
            ++n;
        }
        if (n == 0 || st <= 0.0) continue;
        pooled_e += se;
        pooled_t += st;
        out.slot_relative[s] = std::sqrt(se / st);
        slot_sum += out.slot_relative[s];
        ++slot_n;
        param_sum[param] += out.slot_relative[s];
        ++param_n[param];
    }
    out.mean_relative = slot_n ? slot_sum / static_cast<double>(slot_n) : std::nan("");
    for (std::size_t j = 0; j < kParamsPerHour; ++j)
        out.param_relative[j] = param_n[j] ? param_sum[j] / static_cast<double>(param_n[j]) : std::nan("");
    out.pooled_relative = pooled_t > 0.0 ? std::sqrt(pooled_e / pooled_t) : std::nan("");
    return out;
}

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

nlohmann::json mapping_json(const MappingError& e) {
    nlohmann::json per_param;
    for (std::size_t j = 0; j < kParamsPerHour; ++j) per_param[kParamNames[j]] = number_or_null(e.param_relative[j]);
    nlohmann::json slots = nlohmann::json::array();
    for (double v : e.slot_relative) slots.push_back(number_or_null(v));
    return {{"slot_mean_relative_rmse", number_or_null(e.mean_relative)},
            {"pooled_relative_rmse", number_or_null(e.pooled_relative)},
            {"per_parameter", per_param},
            {"per_slot", slots}};
}

}  // namespace

nlohmann::json WeatherSchema::to_json() const {
    return {{"format_version", 1},
            {"grid_start_hour", grid_start_hour},
            {"m", m},
            {"step_seconds", step_seconds},
            {"utc_offset", utc_offset},
            {"feature_names", feature_names},
            {"imputation_medians", imputer.medians}};
}

WeatherSchema WeatherSchema::from_json(const nlohmann::json& j) {
    WeatherSchema s;
    try {
        s.grid_start_hour = j.at("grid_start_hour").get<int>();
        s.m = j.at("m").get<std::size_t>();
        s.step_seconds = j.at("step_seconds").get<double>();
        s.utc_offset = j.at("utc_offset").get<double>();
        s.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        s.imputer.medians = j.at("imputation_medians").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Data, std::string("malformed weather schema: ") + e.what());
    }
    require(s.imputer.medians.size() == s.m * s.feature_names.size(), ErrorKind::Data,
            "weather schema medians do not cover m * p features");
    return s;
}

std::uint64_t date_key(const std::string& date) {
    std::uint64_t key = 0;
    for (char c : date)
        if (c >= '0' && c <= '9') key = key * 10 + static_cast<std::uint64_t>(c - '0');
    return key;
}

ParamsDocument identify_series(const NormalizedPv& pv, const RunConfig& config, int grid_start_hour,
                               std::vector<std::string>* warnings) {
    ParamsDocument doc;
    doc.grid_start_hour = grid_start_hour;
    doc.m = config.m;
    doc.step_seconds = pv.series.step_seconds;
    const auto dates = series_dates(pv.series, config.site.utc_offset);
    std::vector<std::optional<DayFit>> fits(dates.size());
    std::vector<std::string> errors(dates.size());
    parallel_for(dates.size(), [&](std::size_t k) {
        const DayWindow w = day_window(pv, dates[k], config.site.utc_offset, grid_start_hour, config.m);
        try {
            fits[k] = identify_day(w.values, w.mask, config.m, pv.series.step_seconds, config.estimation);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Data) throw;
            errors[k] = e.what();
        }
    });
    for (std::size_t k = 0; k < dates.size(); ++k) {
        if (!fits[k]) {
            if (warnings) warnings->push_back("day " + dates[k] + " skipped: " + errors[k]);
            continue;
        }
        doc.days[dates[k]] = fits[k]->params;
        auto& flags = doc.flags[dates[k]];
        for (const auto& r : fits[k]->reports) flags.push_back(r.flags);
    }
    return doc;
}

std::pair<std::vector<std::string>, std::vector<std::string>> split_dates(std::vector<std::string> dates,
                                                                          double fraction, std::uint64_t seed) {
    require(fraction > 0.0 && fraction < 1.0, ErrorKind::Config, "split fraction must be in (0, 1)");
    std::sort(dates.begin(), dates.end());
    Rng rng(seed);
    for (std::size_t i = dates.size(); i > 1; --i) std::swap(dates[i - 1], dates[rng.index(i)]);
    const auto n_train = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(dates.size())));
    std::vector<std::string> train(dates.begin(), dates.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::string> test(dates.begin() + static_cast<std::ptrdiff_t>(n_train), dates.end());
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {train, test};
}

SimulationFan climatology_fan(const std::vector<DayWindow>& training_days, double step_seconds,
                              const std::vector<double>& levels) {
    require(!training_days.empty(), ErrorKind::Data, "climatology needs at least one training day");
    const std::size_t steps = training_days.front().values.size();
    Eigen::MatrixXd paths(static_cast<Eigen::Index>(training_days.size()), static_cast<Eigen::Index>(steps));
    std::vector<double> column;
    for (std::size_t t = 0; t < steps; ++t) {
        column.clear();
        for (const auto& d : training_days) {
            require(d.values.size() == steps, ErrorKind::Dimension, "training windows differ in length");
            if (d.mask[t]) column.push_back(d.values[t]);
        }
        std::sort(column.begin(), column.end());
        const double fill = column.empty() ? 0.0 : sorted_quantile(column, 0.5);
        for (std::size_t k = 0; k < training_days.size(); ++k)
            paths(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t)) =
                training_days[k].mask[t] ? training_days[k].values[t] : fill;
    }
    return SimulationFan(std::move(paths), step_seconds, levels);
}

std::vector<TrainingPair> training_pairs(const ParamsDocument& params, const std::vector<WeatherDay>& weather,
                                         const std::vector<std::string>& dates) {
    const auto weather_by_date = by_date(weather);
    std::vector<TrainingPair> pairs;
    for (const auto& date : dates) {
        const auto p = params.days.find(date);
        const auto w = weather_by_date.find(date);
        if (p == params.days.end() || w == weather_by_date.end()) continue;
        TrainingPair pair;
        pair.weather = w->second;
        pair.params = p->second;
        if (const auto f = params.flags.find(date); f != params.flags.end()) pair.flags = f->second;
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

CommandResult cmd_identify(const RunConfig& config, const std::filesystem::path& out_dir) {
    require_input(config.pv, "input.pv");
    const NormalizedPv pv = load_normalized_pv(config.pv, config);
    const int grid = config.grid_start_hour.value_or(select_hour_grid(pv, config.site.utc_offset, config.m));
    CommandResult result;
    const ParamsDocument doc = identify_series(pv, config, grid, &result.warnings);
    require(!doc.days.empty(), ErrorKind::Data, "no day could be identified");
    const auto path = out_dir / "params.json";
    write_params(path, doc);
    result.outputs.push_back(path);
    std::size_t flagged = 0;
    for (const auto& [date, flags] : doc.flags)
        for (auto f : flags) flagged += (f & kInterpolated) ? 1 : 0;
    result.summary = {{"days", doc.days.size()},
                      {"grid_start_hour", grid},
                      {"m", doc.m},
                      {"interpolated_hours", flagged},
                      {"samples_over_rating", pv.over_rating}};
    return result;
}

CommandResult cmd_train(const RunConfig& config, const std::filesystem::path& out_dir) {
    require_input(config.params, "input.params");
    require_input(config.weather, "input.weather");
    const auto t0 = Clock::now();
    const ParamsDocument params = read_params(config.params);
    CommandResult result;
    WeatherDays weather = group_weather_days(read_weather_csv(config.weather), config.site.utc_offset,
                                             params.grid_start_hour, params.m, config.max_missing_fraction);
    result.warnings = weather.warnings;
    std::vector<std::string> dates;
    for (const auto& [date, p] : params.days) dates.push_back(date);
    const TrainedModel trained = train_model(params, weather.days, dates, config);
    note_fallback(trained.report, result.warnings);
    save_ensemble(trained.ensemble, out_dir);
    write_json(out_dir / "weather_schema.json", trained.schema.to_json());
    const nlohmann::json report = train_report_json(trained);
    write_json(out_dir / "train_report.json", report);
    result.outputs = {out_dir / "manifest.json", out_dir / "weather_schema.json", out_dir / "train_report.json"};
    result.summary = {{"models", trained.ensemble.n_models()},
                      {"training_days", trained.ensemble.slots.empty() ? 0 : trained.ensemble.slots.front().n_pairs},
                      {"train_seconds", trained.report.seconds},
                      {"total_seconds", seconds_since(t0)}};
    return result;
}

CommandResult cmd_predict(const RunConfig& config, const std::filesystem::path& out_dir) {
    require_input(config.model, "input.model");
    require_input(config.weather, "input.weather");
    const EnsembleModel model = load_ensemble(config.model);
    const WeatherSchema schema = WeatherSchema::from_json(read_json(config.model / "weather_schema.json"));
    CommandResult result;
    WeatherDays weather = group_weather_days(read_weather_csv(config.weather), schema.utc_offset,
                                             schema.grid_start_hour, schema.m, config.max_missing_fraction);
    result.warnings = weather.warnings;
    require(!weather.days.empty(), ErrorKind::Data, "no usable weather days to predict");
    for (auto& d : weather.days) schema.imputer.apply(d);
    const auto predictions = predict_days(model, weather.days);

    ParamsDocument doc;
    doc.grid_start_hour = schema.grid_start_hour;
    doc.m = schema.m;
    doc.step_seconds = schema.step_seconds;
    std::size_t events = 0;
    for (std::size_t k = 0; k < weather.days.size(); ++k) {
        doc.days[weather.days[k].date] = predictions[k].params;
        if (!predictions[k].events.empty()) doc.projections[weather.days[k].date] = predictions[k].events;
        events += predictions[k].events.size();
    }
    const auto path = out_dir / "predictions.json";
    write_params(path, doc);
    result.outputs.push_back(path);
    result.summary = {{"days", doc.days.size()}, {"projection_events", events}};
    return result;
}

CommandResult cmd_simulate(const RunConfig& config, const std::filesystem::path& out_dir) {
    require_input(config.params, "input.params");
    const ParamsDocument doc = read_params(config.params);
    require(!doc.days.empty(), ErrorKind::Data, "parameter file holds no days");
    RunConfig sim_config = config;
    sim_config.step_seconds = doc.step_seconds;
    CommandResult result;
    for (const auto& [date, params] : doc.days) {
        const FanMeta meta = fan_meta_for(date, params, doc.grid_start_hour, sim_config);
        write_fan(out_dir, regenerate_fan(meta), meta, config.site.utc_offset);
        result.outputs.push_back(out_dir / ("fan_" + date + ".csv"));
    }
    result.summary = {{"days", doc.days.size()},
                      {"paths", config.paths},
                      {"steps_per_path", doc.m * static_cast<std::size_t>(3600.0 / doc.step_seconds)}};
    return result;
}

CommandResult cmd_evaluate(const RunConfig& config, const std::filesystem::path& out_dir) {
    require_input(config.fan, "input.fan");
    require_input(config.pv, "input.pv");
    const auto metas = read_fan_metas(config.fan);
    const NormalizedPv pv = load_normalized_pv(config.pv, config);
    CommandResult result;
    nlohmann::json doc = nlohmann::json::object();
    std::string csv = metric_csv_header() + "\n";
    std::vector<MetricReport> reports;
    for (const auto& meta : metas) {
        const SimulationFan fan = regenerate_fan(meta);
        const DayWindow w = day_window(pv, meta.date, config.site.utc_offset, meta.grid_start_hour, meta.params.m());
        try {
            const MetricReport r = evaluate(fan, w.values, w.mask, config.metrics);
            doc[meta.date] = to_json(r);
            csv += metric_csv_row(meta.date, r) + "\n";
            reports.push_back(r);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::UndefinedMetric && e.kind() != ErrorKind::Data) throw;
            result.warnings.push_back("day " + meta.date + " not evaluated: " + e.what());
        }
    }
    require(!reports.empty(), ErrorKind::UndefinedMetric, "no day could be evaluated");
    const MetricReport mean = mean_report(reports);
    doc["_mean"] = to_json(mean);
    csv += metric_csv_row("mean", mean) + "\n";
    write_json(out_dir / "metrics.json", doc);
    write_file_atomic(out_dir / "metrics.csv", csv);
    result.outputs = {out_dir / "metrics.json", out_dir / "metrics.csv"};
    result.summary = {{"days", reports.size()}, {"mean", to_json(mean)}};
    return result;
}

CommandResult cmd_synth(const RunConfig& config, const std::filesystem::path& out_dir) {
    const SyntheticSpec spec = SyntheticSpec::from_config(config);
    const SyntheticDataset ds = synth_generate(spec);
    write_file_atomic(out_dir / "weather.csv", format_weather_csv(ds.weather, config.site.utc_offset));
    write_file_atomic(out_dir / "pv.csv", format_pv_csv(ds.pv, config.site.utc_offset));
    write_params(out_dir / "truth.json", ds.truth);
    nlohmann::json meta = spec.to_json();
    meta["regime_dates"] = ds.regime_dates;
    write_json(out_dir / "synth.json", meta);
    CommandResult result;
    result.outputs = {out_dir / "weather.csv", out_dir / "pv.csv", out_dir / "truth.json", out_dir / "synth.json"};
    result.summary = {{"days", ds.truth.days.size()},
                      {"regime_days", ds.regime_dates.size()},
                      {"pv_samples", ds.pv.values.size()}};
    return result;
}

CommandResult cmd_e2e(const RunConfig& config, const std::filesystem::path& out_dir) {
    require_input(config.dataset, "input.dataset");
    const auto t0 = Clock::now();
    CommandResult result;
    nlohmann::json timing;

    // Identification on the whole record.
    const NormalizedPv pv = load_normalized_pv(config.dataset / "pv.csv", config);
    const int grid = config.grid_start_hour.value_or(select_hour_grid(pv, config.site.utc_offset, config.m));
    const ParamsDocument identified = identify_series(pv, config, grid, &result.warnings);
    write_params(out_dir / "params.json", identified);
    timing["identify"] = seconds_since(t0);

    // Weather and the seeded split.
    WeatherDays weather = group_weather_days(read_weather_csv(config.dataset / "weather.csv"), config.site.utc_offset,
                                             grid, config.m, config.max_missing_fraction);
    result.warnings.insert(result.warnings.end(), weather.warnings.begin(), weather.warnings.end());
    std::vector<std::string> usable;
    for (const auto& d : weather.days)
        if (identified.days.count(d.date)) usable.push_back(d.date);
    require(usable.size() >= 2, ErrorKind::Data, "fewer than two days have both weather and identified parameters");
    const auto [train, test] = split_dates(usable, config.split, stream_seed(config.seed, SeedStream::Split));
    require(!test.empty(), ErrorKind::Data, "split leaves no test days");
    write_json(out_dir / "split.json", {{"train", train}, {"test", test}});

    // Mapping.
    auto t1 = Clock::now();
    const TrainedModel trained = train_model(identified, weather.days, train, config);
    note_fallback(trained.report, result.warnings);
    save_ensemble(trained.ensemble, out_dir / "model");
    write_json(out_dir / "model" / "weather_schema.json", trained.schema.to_json());
    write_json(out_dir / "model" / "train_report.json", train_report_json(trained));
    timing["train"] = seconds_since(t1);

    t1 = Clock::now();
    const auto weather_by_date = by_date(weather.days);
    std::vector<WeatherDay> test_weather;
    for (const auto& date : test) {
        WeatherDay d = weather_by_date.at(date);
        trained.schema.imputer.apply(d);
        test_weather.push_back(std::move(d));
    }
    const auto predictions = predict_days(trained.ensemble, test_weather);
    ParamsDocument predicted;
    predicted.grid_start_hour = grid;
    predicted.m = config.m;
    predicted.step_seconds = config.step_seconds;
    for (std::size_t k = 0; k < test.size(); ++k) {
        predicted.days[test[k]] = predictions[k].params;
        if (!predictions[k].events.empty()) predicted.projections[test[k]] = predictions[k].events;
    }
    write_params(out_dir / "predictions.json", predicted);
    timing["predict"] = seconds_since(t1);

    // Forecast fans against the climatology baseline.
    t1 = Clock::now();
    std::vector<DayWindow> train_windows;
    for (const auto& date : train)
        train_windows.push_back(day_window(pv, date, config.site.utc_offset, grid, config.m));
    const SimulationFan baseline = climatology_fan(train_windows, config.step_seconds);

    nlohmann::json per_day = nlohmann::json::array();
    std::string csv = "date,model," + metric_csv_header().substr(std::string("label,").size()) + "\n";
    std::vector<MetricReport> sde_reports, clim_reports;
    std::size_t beats_nd = 0, beats_kl = 0, beats_both = 0;
    for (const auto& date : test) {
        const DayWindow w = day_window(pv, date, config.site.utc_offset, grid, config.m);
        const FanMeta meta = fan_meta_for(date, predicted.days.at(date), grid, config);
        try {
            const MetricReport sde = evaluate(regenerate_fan(meta), w.values, w.mask, config.metrics);
            const MetricReport clim = evaluate(baseline, w.values, w.mask, config.metrics);
            sde_reports.push_back(sde);
            clim_reports.push_back(clim);
            const bool nd_better = sde.nd < clim.nd;
            const bool kl_better = sde.kl < clim.kl;
            beats_nd += nd_better;
            beats_kl += kl_better;
            beats_both += nd_better && kl_better;
            per_day.push_back({{"date", date}, {"sde", to_json(sde)}, {"climatology", to_json(clim)}});
            csv += metric_csv_row(date + ",sde", sde) + "\n";
            csv += metric_csv_row(date + ",climatology", clim) + "\n";
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::UndefinedMetric && e.kind() != ErrorKind::Data) throw;
            result.warnings.push_back("test day " + date + " not evaluated: " + e.what());
        }
    }
    require(!sde_reports.empty(), ErrorKind::UndefinedMetric, "no test day could be evaluated");
    timing["evaluate"] = seconds_since(t1);

    const double n_eval = static_cast<double>(sde_reports.size());
    nlohmann::json summary;
    summary["grid_start_hour"] = grid;
    summary["m"] = config.m;
    summary["days"] = {{"identified", identified.days.size()},
                       {"usable", usable.size()},
                       {"train", train.size()},
                       {"test", test.size()},
                       {"evaluated", sde_reports.size()}};
    summary["models"] = trained.ensemble.n_models();
    summary["mapping_error"]["vs_identified"] =
        mapping_json(mapping_error(predicted.days, identified.days, 0, config.m, &identified.flags,
                                   config.ensemble.exclude_flags));
    if (std::filesystem::exists(config.dataset / "truth.json")) {
        const ParamsDocument truth = read_params(config.dataset / "truth.json");
        require(truth.grid_start_hour == 0 && truth.m == 24, ErrorKind::Data, "truth.json must hold all 24 hours");
        summary["mapping_error"]["vs_truth"] =
            mapping_json(mapping_error(predicted.days, truth.days, static_cast<std::size_t>(grid), config.m, nullptr, 0));
        summary["identification_error_vs_truth"] =
            mapping_json(mapping_error(identified.days, truth.days, static_cast<std::size_t>(grid), config.m,
                                       &identified.flags, config.ensemble.exclude_flags));
    }
    summary["sde"] = to_json(mean_report(sde_reports));
    summary["climatology"] = to_json(mean_report(clim_reports));
    summary["beats_climatology"] = {{"nd", beats_nd / n_eval}, {"kl", beats_kl / n_eval}, {"nd_and_kl", beats_both / n_eval}};
    summary["per_day"] = per_day;
    write_json(out_dir / "summary.json", summary);
    write_file_atomic(out_dir / "summary.csv", csv);

    result.outputs = {out_dir / "params.json", out_dir / "model", out_dir / "predictions.json",
                      out_dir / "summary.json", out_dir / "summary.csv"};
    timing["total"] = seconds_since(t0);
    result.summary = summary;
    result.summary.erase("per_day");
    result.summary["seconds"] = timing;
    return result;
}

CommandResult run_command(const std::string& name, const RunConfig& config, const std::filesystem::path& out_dir) {
    if (name == "identify") return cmd_identify(config, out_dir);
    if (name == "train") return cmd_train(config, out_dir);
    if (name == "predict") return cmd_predict(config, out_dir);
    if (name == "simulate") return cmd_simulate(config, out_dir);
    if (name == "evaluate") return cmd_evaluate(config, out_dir);
    if (name == "synth") return cmd_synth(config, out_dir);
    if (name == "e2e") return cmd_e2e(config, out_dir);
    throw Error(ErrorKind::Config, "unknown command '" + name + "'");
}

}  // namespace pvsde
