#include "pvsde/config.hpp"

#include <charconv>
#include <functional>
#include <sstream>
#include <vector>

#include <CLI11.hpp>

#include "pvsde/error.hpp"
#include "pvsde/serialize.hpp"

namespace pvsde {

namespace {

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    require(ec == std::errc{} && ptr == v.data() + v.size(), ErrorKind::Config,
            "config key '" + key + "': '" + v + "' is not a number");
    return out;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    require(ec == std::errc{} && ptr == v.data() + v.size(), ErrorKind::Config,
            "config key '" + key + "': '" + v + "' is not a non-negative integer");
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw Error(ErrorKind::Config, "config key '" + key + "': '" + v + "' is not a boolean");
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

struct Field {
    std::function<void(RunConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <typename T>
Field number(T RunConfig::*member) {
    return {[member](RunConfig& c, const std::string& k, const std::string& v) {
                if constexpr (std::is_floating_point_v<T>)
                    c.*member = to_double(k, v);
                else
                    c.*member = static_cast<T>(to_unsigned(k, v));
            },
            [member](const RunConfig& c) {
                if constexpr (std::is_floating_point_v<T>)
                    return format_double(c.*member);
                else
                    return std::to_string(c.*member);
            }};
}

Field real(std::function<double&(RunConfig&)> ref) {
    return {[ref](RunConfig& c, const std::string& k, const std::string& v) { ref(c) = to_double(k, v); },
            [ref](const RunConfig& c) { return format_double(ref(const_cast<RunConfig&>(c))); }};
}

Field count(std::function<std::size_t&(RunConfig&)> ref) {
    return {[ref](RunConfig& c, const std::string& k, const std::string& v) {
                ref(c) = static_cast<std::size_t>(to_unsigned(k, v));
            },
            [ref](const RunConfig& c) { return std::to_string(ref(const_cast<RunConfig&>(c))); }};
}

Field path(std::filesystem::path RunConfig::*member) {
    return {[member](RunConfig& c, const std::string&, const std::string& v) { c.*member = v; },
            [member](const RunConfig& c) { return (c.*member).string(); }};
}

const std::map<std::string, Field>& fields() {
    static const std::map<std::string, Field> table = [] {
        std::map<std::string, Field> t;
        t["seed"] = number(&RunConfig::seed);
        t["m"] = number(&RunConfig::m);
        t["split"] = number(&RunConfig::split);
        t["paths"] = number(&RunConfig::paths);
        t["step_seconds"] = number(&RunConfig::step_seconds);
        t["substeps"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                             c.substeps = static_cast<int>(to_unsigned(k, v));
                         },
                         [](const RunConfig& c) { return std::to_string(c.substeps); }};
        t["max_missing_fraction"] = number(&RunConfig::max_missing_fraction);
        t["grid_start_hour"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                                    if (v == "auto")
                                        c.grid_start_hour.reset();
                                    else
                                        c.grid_start_hour = static_cast<int>(to_unsigned(k, v));
                                },
                                [](const RunConfig& c) {
                                    return c.grid_start_hour ? std::to_string(*c.grid_start_hour) : "auto";
                                }};

        t["site.latitude"] = real([](RunConfig& c) -> double& { return c.site.latitude; });
        t["site.longitude"] = real([](RunConfig& c) -> double& { return c.site.longitude; });
        t["site.utc_offset"] = real([](RunConfig& c) -> double& { return c.site.utc_offset; });
        t["site.rated_power"] = real([](RunConfig& c) -> double& { return c.site.rated_power; });
        t["site.elevation_cutoff"] = real([](RunConfig& c) -> double& { return c.site.elevation_cutoff; });

        t["ensemble.hidden"] = count([](RunConfig& c) -> std::size_t& { return c.ensemble.hidden; });
        t["ensemble.members"] = count([](RunConfig& c) -> std::size_t& { return c.ensemble.members; });
        t["ensemble.trim_fraction"] = real([](RunConfig& c) -> double& { return c.ensemble.trim_fraction; });
        t["ensemble.ridge"] = real([](RunConfig& c) -> double& { return c.ensemble.ridge; });
        t["ensemble.min_pairs"] = count([](RunConfig& c) -> std::size_t& { return c.ensemble.min_pairs; });
        t["ensemble.hour_local"] = {
            [](RunConfig& c, const std::string& k, const std::string& v) { c.ensemble.hour_local = to_bool(k, v); },
            [](const RunConfig& c) { return bool_text(c.ensemble.hour_local); }};

        t["estimation.bound_floor"] = real([](RunConfig& c) -> double& { return c.estimation.bound_floor; });
        t["estimation.bound_ceiling"] = real([](RunConfig& c) -> double& { return c.estimation.bound_ceiling; });
        t["estimation.max_iterations"] =
            count([](RunConfig& c) -> std::size_t& { return c.estimation.optimizer.max_iterations; });

        t["metrics.kl_bins"] = count([](RunConfig& c) -> std::size_t& { return c.metrics.kl_bins; });
        t["metrics.acf_window_seconds"] =
            real([](RunConfig& c) -> double& { return c.metrics.acf_window_seconds; });
        t["metrics.acf_max_paths"] = count([](RunConfig& c) -> std::size_t& { return c.metrics.acf_max_paths; });

        t["synth.days"] = count([](RunConfig& c) -> std::size_t& { return c.synth.days; });
        t["synth.regime_days"] = count([](RunConfig& c) -> std::size_t& { return c.synth.regime_days; });
        t["synth.param_noise"] = real([](RunConfig& c) -> double& { return c.synth.param_noise; });
        t["synth.start_date"] = {[](RunConfig& c, const std::string&, const std::string& v) { c.synth.start_date = v; },
                                 [](const RunConfig& c) { return c.synth.start_date; }};

        t["input.pv"] = path(&RunConfig::pv);
        t["input.weather"] = path(&RunConfig::weather);
        t["input.params"] = path(&RunConfig::params);
        t["input.model"] = path(&RunConfig::model);
        t["input.fan"] = path(&RunConfig::fan);
        t["input.dataset"] = path(&RunConfig::dataset);
        return t;
    }();
    return table;
}

}  // namespace

void RunConfig::validate() const {
    site.validate();
    require(m >= 1 && m <= 24, ErrorKind::Config, "m must be in [1, 24]");
    if (grid_start_hour)
        require(*grid_start_hour >= 0 && *grid_start_hour + static_cast<int>(m) <= 24, ErrorKind::Config,
                "grid_start_hour + m must stay within one day");
    require(split > 0.0 && split < 1.0, ErrorKind::Config, "split must be in (0, 1)");
    require(paths >= 1, ErrorKind::Config, "paths must be >= 1");
    require(max_missing_fraction >= 0.0 && max_missing_fraction <= 1.0, ErrorKind::Config,
            "max_missing_fraction must be in [0, 1]");
    SimulationOptions sim;
    sim.step_seconds = step_seconds;
    sim.substeps = substeps;
    sim.validate();
    ensemble.validate();
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
    RunConfig config;
    std::istringstream in(text);
    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigINI().from_config(in);
    } catch (const CLI::Error& e) {
        throw Error(ErrorKind::Config, std::string("config: ") + e.what());
    }
    for (const auto& item : items) {
        if (item.name == "++" || item.name == "--") continue;  // section markers
        const std::string key = item.fullname();
        const auto it = fields().find(key);
        require(it != fields().end(), ErrorKind::Config, "unknown config key '" + key + "'");
        require(item.inputs.size() == 1, ErrorKind::Config, "config key '" + key + "' needs exactly one value");
        it->second.set(config, key, item.inputs.front());
    }
    for (auto* p : {&config.pv, &config.weather, &config.params, &config.model, &config.fan, &config.dataset})
        if (!p->empty() && p->is_relative() && !base_dir.empty()) *p = base_dir / *p;
    config.validate();
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    return parse_config(read_file(path), path.parent_path());
}

void set_config_value(RunConfig& config, const std::string& key, const std::string& value) {
    const auto it = fields().find(key);
    require(it != fields().end(), ErrorKind::Config, "unknown config key '" + key + "'");
    it->second.set(config, key, value);
}

std::map<std::string, std::string> config_entries(const RunConfig& config) {
    std::map<std::string, std::string> out;
    for (const auto& [key, field] : fields()) out[key] = field.get(config);
    return out;
}

std::uint64_t stream_seed(std::uint64_t master, SeedStream stream, std::uint64_t extra) {
    return derive_seed({master, static_cast<std::uint64_t>(stream), extra});
}

}  // namespace pvsde
