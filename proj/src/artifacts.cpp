#include "pvsde/artifacts.hpp"

#include <algorithm>
#include <cmath>

#include "pvsde/error.hpp"
#include "pvsde/serialize.hpp"

namespace pvsde {

namespace {

constexpr int kParamsFormatVersion = 1;
constexpr int kFanFormatVersion = 1;

nlohmann::json hour_to_json(const SdeParams& p, std::uint32_t flags) {
    return {{"a", p.a}, {"b", p.b}, {"beta", p.beta}, {"c", p.c}, {"d", p.d}, {"flags", flag_names(flags)}};
}

}  // namespace

nlohmann::json params_to_json(const ParamsDocument& doc) {
    nlohmann::json j;
    j["_meta"] = {{"format_version", kParamsFormatVersion},
                  {"grid_start_hour", doc.grid_start_hour},
                  {"m", doc.m},
                  {"step_seconds", doc.step_seconds}};
    for (const auto& [date, day] : doc.days) {
        require(day.m() == doc.m, ErrorKind::Dimension, "parameters for " + date + " do not have m hours");
        const auto flags = doc.flags.find(date);
        nlohmann::json hours = nlohmann::json::array();
        for (std::size_t i = 0; i < day.m(); ++i)
            hours.push_back(hour_to_json(day.hours[i], flags == doc.flags.end() ? 0u : flags->second.at(i)));
        j[date] = std::move(hours);
    }
    if (!doc.projections.empty()) {
        nlohmann::json proj = nlohmann::json::object();
        for (const auto& [date, events] : doc.projections) {
            nlohmann::json list = nlohmann::json::array();
            for (const auto& e : events) list.push_back({{"hour", e.hour}, {"event", e.what}});
            proj[date] = std::move(list);
        }
        j["_projections"] = std::move(proj);
    }
    return j;
}

ParamsDocument params_from_json(const nlohmann::json& j) {
    ParamsDocument doc;
    try {
        const auto& meta = j.at("_meta");
        require(meta.value("format_version", 0) == kParamsFormatVersion, ErrorKind::Data,
                "unsupported parameter file version");
        doc.grid_start_hour = meta.at("grid_start_hour").get<int>();
        doc.m = meta.at("m").get<std::size_t>();
        doc.step_seconds = meta.at("step_seconds").get<double>();
        for (const auto& [key, value] : j.items()) {
            if (!key.empty() && key.front() == '_') continue;
            require(value.is_array() && value.size() == doc.m, ErrorKind::Data,
                    "parameters for " + key + " must be an array of " + std::to_string(doc.m) + " hours");
            DayParams day;
            std::vector<std::uint32_t> flags;
            for (const auto& h : value) {
                SdeParams p{h.at("a").get<double>(), h.at("b").get<double>(), h.at("beta").get<double>(),
                            h.at("c").get<double>(), h.at("d").get<double>()};
                std::uint32_t f = 0;
                if (h.contains("flags"))
                    for (const auto& name : h["flags"]) f |= parse_flag(name.get<std::string>());
                day.hours.push_back(p);
                flags.push_back(f);
            }
            try {
                day.validate();
            } catch (const Error& e) {
                throw Error(ErrorKind::Data, "parameters for " + key + ": " + e.what());
            }
            doc.days[key] = std::move(day);
            doc.flags[key] = std::move(flags);
        }
        if (j.contains("_projections"))
            for (const auto& [date, list] : j["_projections"].items())
                for (const auto& e : list)
                    doc.projections[date].push_back({e.at("hour").get<std::size_t>(), e.at("event").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Data, std::string("malformed parameter file: ") + e.what());
    }
    return doc;
}

void write_params(const std::filesystem::path& path, const ParamsDocument& doc) {
    write_json(path, params_to_json(doc));
}

ParamsDocument read_params(const std::filesystem::path& path) {
    try {
        return params_from_json(read_json(path));
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

SimulationOptions FanMeta::simulation_options() const {
    SimulationOptions o;
    o.step_seconds = step_seconds;
    o.substeps = substeps;
    return o;
}

nlohmann::json fan_meta_to_json(const FanMeta& meta) {
    nlohmann::json hours = nlohmann::json::array();
    for (const auto& p : meta.params.hours) hours.push_back(hour_to_json(p, 0));
    return {{"format_version", kFanFormatVersion},
            {"date", meta.date},
            {"start", format_iso8601(meta.start)},
            {"grid_start_hour", meta.grid_start_hour},
            {"step_seconds", meta.step_seconds},
            {"substeps", meta.substeps},
            {"n_paths", meta.n_paths},
            {"seed", meta.seed},
            {"p0", meta.p0 ? nlohmann::json(*meta.p0) : nlohmann::json(nullptr)},
            {"levels", meta.levels},
            {"params", std::move(hours)}};
}

FanMeta fan_meta_from_json(const nlohmann::json& j) {
    FanMeta meta;
    try {
        require(j.value("format_version", 0) == kFanFormatVersion, ErrorKind::Data, "unsupported fan meta version");
        meta.date = j.at("date").get<std::string>();
        meta.start = parse_iso8601(j.at("start").get<std::string>());
        meta.grid_start_hour = j.at("grid_start_hour").get<int>();
        meta.step_seconds = j.at("step_seconds").get<double>();
        meta.substeps = j.at("substeps").get<int>();
        meta.n_paths = j.at("n_paths").get<std::size_t>();
        meta.seed = j.at("seed").get<std::uint64_t>();
        if (!j.at("p0").is_null()) meta.p0 = j["p0"].get<double>();
        meta.levels = j.at("levels").get<std::vector<double>>();
        for (const auto& h : j.at("params"))
            meta.params.hours.push_back({h.at("a").get<double>(), h.at("b").get<double>(), h.at("beta").get<double>(),
                                         h.at("c").get<double>(), h.at("d").get<double>()});
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Data, std::string("malformed fan meta: ") + e.what());
    }
    return meta;
}

std::string quantile_column(double level) {
    const double pct = level * 100.0;
    if (pct == std::round(pct)) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "q%02d", static_cast<int>(pct));
        return buf;
    }
    return "q" + format_double(pct);
}

std::string format_fan_csv(const SimulationFan& fan, const FanMeta& meta, double utc_offset_hours) {
    std::string out = "step,timestamp,mean";
    std::vector<std::vector<double>> bands;
    for (double level : meta.levels) {
        out += "," + quantile_column(level);
        bands.push_back(fan.quantile(level));
    }
    out += "\n";
    for (std::size_t t = 0; t < fan.n_steps(); ++t) {
        // Row t lines up with the PV sample at start + t * step.
        const UtcSeconds ts = meta.start + static_cast<UtcSeconds>(std::llround(static_cast<double>(t) * fan.step_seconds()));
        out += std::to_string(t) + "," + format_iso8601_local(ts, utc_offset_hours) + "," + format_double(fan.mean()[t]);
        for (const auto& band : bands) out += "," + format_double(band[t]);
        out += "\n";
    }
    return out;
}

void write_fan(const std::filesystem::path& dir, const SimulationFan& fan, const FanMeta& meta,
               double utc_offset_hours) {
    write_file_atomic(dir / ("fan_" + meta.date + ".csv"), format_fan_csv(fan, meta, utc_offset_hours));
    write_json(dir / ("fan_" + meta.date + ".meta.json"), fan_meta_to_json(meta));
}

std::vector<FanMeta> read_fan_metas(const std::filesystem::path& path) {
    std::vector<std::filesystem::path> files;
    if (std::filesystem::is_directory(path)) {
        for (const auto& entry : std::filesystem::directory_iterator(path)) {
            const std::string name = entry.path().filename().string();
            if (name.size() > 10 && name.rfind("fan_", 0) == 0 && name.ends_with(".meta.json"))
                files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
    } else {
        require(std::filesystem::exists(path), ErrorKind::Io, "no fan meta at " + path.string());
        files.push_back(path);
    }
    require(!files.empty(), ErrorKind::Io, "no fan_*.meta.json files in " + path.string());
    std::vector<FanMeta> metas;
    for (const auto& f : files) {
        try {
            metas.push_back(fan_meta_from_json(read_json(f)));
        } catch (const Error& e) {
            throw Error(e.kind(), f.string() + ": " + e.what());
        }
    }
    return metas;
}

SimulationFan regenerate_fan(const FanMeta& meta) {
    return make_fan(meta.params, meta.p0, meta.n_paths, meta.seed, meta.simulation_options(), meta.levels);
}

nlohmann::json read_json(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Data, path.string() + ": invalid JSON: " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    write_file_atomic(path, j.dump(2) + "\n");
}

}  // namespace pvsde
