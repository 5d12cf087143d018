#include "pvsde/pvdata.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <map>

#include "csv.hpp"
#include "pvsde/error.hpp"
#include "pvsde/serialize.hpp"

namespace pvsde {

namespace {

void check_step(double step_seconds) {
    require(step_seconds >= 1.0 && std::fmod(3600.0, step_seconds) == 0.0 && step_seconds == std::floor(step_seconds),
            ErrorKind::Config, "PV step must be a whole number of seconds dividing 3600");
}

}  // namespace

RawPvSeries parse_pv_csv(const std::string& text, double step_seconds, const std::string& source) {
    check_step(step_seconds);
    const auto rows = csv::lines(text);
    std::size_t header_line = 0;
    while (header_line < rows.size() && rows[header_line].empty()) ++header_line;
    require(header_line < rows.size(), ErrorKind::Data, source + ": empty PV file");
    const auto header = csv::split(rows[header_line]);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    require(col.count("timestamp") && col.count("power_kw"), ErrorKind::Data,
            source + ": PV file needs columns timestamp and power_kw");

    RawPvSeries series;
    series.step_seconds = step_seconds;
    const auto step = static_cast<std::int64_t>(step_seconds);
    bool first = true;
    for (std::size_t li = header_line + 1; li < rows.size(); ++li) {
        if (rows[li].empty()) continue;
        const std::size_t line = li + 1;
        const std::string where = source + ":" + std::to_string(line);
        const auto f = csv::split(rows[li]);
        require(f.size() == header.size(), ErrorKind::Data,
                where + ": expected " + std::to_string(header.size()) + " fields, got " + std::to_string(f.size()));
        UtcSeconds t = 0;
        try {
            t = parse_iso8601(f[col["timestamp"]]);
        } catch (const Error& e) {
            throw Error(ErrorKind::Data, where + ": " + e.what());
        }
        const double v = csv::number(f[col["power_kw"]], source, line, "power_kw");
        if (first) {
            series.start_timestamp = t;
            first = false;
        }
        const std::int64_t offset = t - series.start_timestamp;
        require(offset % step == 0, ErrorKind::Data, where + ": timestamp is off the " + std::to_string(step) + " s grid");
        require(offset >= 0 && (series.values.empty() || static_cast<std::size_t>(offset / step) >= series.values.size()),
                ErrorKind::Data, where + ": timestamps must be strictly increasing");
        const auto index = static_cast<std::size_t>(offset / step);
        series.values.resize(index, std::numeric_limits<double>::quiet_NaN());
        series.values.push_back(v);
    }
    require(!series.values.empty(), ErrorKind::Data, source + ": no PV samples");
    return series;
}

RawPvSeries read_pv_csv(const std::filesystem::path& path, double step_seconds) {
    return parse_pv_csv(read_file(path), step_seconds, path.string());
}

std::string format_pv_csv(const RawPvSeries& series, double utc_offset_hours) {
    std::string out = std::string(kPvCsvHeader) + "\n";
    out.reserve(series.values.size() * 36);
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        out += format_iso8601_local(series.timestamp(i), utc_offset_hours);
        out += ',';
        if (std::isfinite(series.values[i])) out += format_double(series.values[i]);
        out += '\n';
    }
    return out;
}

std::vector<std::string> series_dates(const PvSeries& series, double utc_offset_hours) {
    std::vector<std::string> dates;
    if (series.values.empty()) return dates;
    const std::string last = local_date(series.timestamp(series.values.size() - 1), utc_offset_hours);
    for (std::string d = local_date(series.start_timestamp, utc_offset_hours); d <= last; d = add_days(d, 1))
        dates.push_back(d);
    return dates;
}

DayWindow day_window(const NormalizedPv& pv, const std::string& date, double utc_offset_hours, int grid_start_hour,
                     std::size_t m) {
    const PvSeries& s = pv.series;
    check_step(s.step_seconds);
    const auto step = static_cast<std::int64_t>(s.step_seconds);
    DayWindow w;
    w.date = date;
    w.start = local_midnight(date, utc_offset_hours) + static_cast<std::int64_t>(grid_start_hour) * 3600;
    const std::int64_t offset = w.start - s.start_timestamp;
    require(offset % step == 0, ErrorKind::Data, "PV grid is not aligned with whole hours");
    const std::size_t n = m * static_cast<std::size_t>(3600 / step);
    w.values.assign(n, 0.0);
    w.mask.assign(n, false);
    for (std::size_t k = 0; k < n; ++k) {
        const std::int64_t idx = offset / step + static_cast<std::int64_t>(k);
        if (idx < 0 || idx >= static_cast<std::int64_t>(s.values.size())) continue;
        w.values[k] = s.values[static_cast<std::size_t>(idx)];
        w.mask[k] = pv.mask[static_cast<std::size_t>(idx)];
    }
    return w;
}

int select_hour_grid(const NormalizedPv& pv, double utc_offset_hours, std::size_t m) {
    require(m >= 1 && m <= 24, ErrorKind::Config, "m must be in [1, 24]");
    std::array<std::size_t, 24> counts{};
    for (std::size_t i = 0; i < pv.series.values.size(); ++i)
        if (pv.mask[i]) ++counts[static_cast<std::size_t>(local_hour(pv.series.timestamp(i), utc_offset_hours))];
    int best = 0;
    std::size_t best_count = 0;
    for (int start = 0; start + static_cast<int>(m) <= 24; ++start) {
        std::size_t total = 0;
        for (std::size_t i = 0; i < m; ++i) total += counts[static_cast<std::size_t>(start) + i];
        if (total > best_count) {
            best_count = total;
            best = start;
        }
    }
    require(best_count > 0, ErrorKind::Data, "PV series has no daylight samples");
    return best;
}

}  // namespace pvsde
