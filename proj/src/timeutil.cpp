#include "pvsde/timeutil.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include "pvsde/error.hpp"

namespace pvsde {

namespace {

using namespace std::chrono;

int parse_int(std::string_view s, std::size_t pos, std::size_t len, std::string_view whole) {
    require(pos + len <= s.size(), ErrorKind::Data, "bad timestamp: '" + std::string(whole) + "'");
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        const char c = s[i];
        require(c >= '0' && c <= '9', ErrorKind::Data, "bad timestamp: '" + std::string(whole) + "'");
        v = v * 10 + (c - '0');
    }
    return v;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

UtcSeconds parse_iso8601(std::string_view text) {
    while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    const std::string_view s = text;
    require(s.size() >= 16 && s[4] == '-' && s[7] == '-' && (s[10] == 'T' || s[10] == ' ') && s[13] == ':',
            ErrorKind::Data, "bad timestamp: '" + std::string(text) + "'");
    const int y = parse_int(s, 0, 4, text);
    const int mo = parse_int(s, 5, 2, text);
    const int d = parse_int(s, 8, 2, text);
    const int hh = parse_int(s, 11, 2, text);
    const int mm = parse_int(s, 14, 2, text);
    int ss = 0;
    std::size_t pos = 16;
    if (pos < s.size() && s[pos] == ':') {
        ss = parse_int(s, 17, 2, text);
        pos = 19;
    }
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    require(ymd.ok() && hh < 24 && mm < 60 && ss < 61, ErrorKind::Data,
            "bad timestamp: '" + std::string(text) + "'");
    std::int64_t offset = 0;
    if (pos < s.size()) {
        if (s[pos] == 'Z') {
            ++pos;
        } else if (s[pos] == '+' || s[pos] == '-') {
            const int sign = s[pos] == '+' ? 1 : -1;
            const int oh = parse_int(s, pos + 1, 2, text);
            int om = 0;
            if (pos + 3 < s.size()) om = parse_int(s, pos + (s[pos + 3] == ':' ? 4 : 3), 2, text);
            offset = sign * (oh * 3600 + om * 60);
            pos = s.size();
        }
        require(pos == s.size(), ErrorKind::Data, "bad timestamp: '" + std::string(text) + "'");
    }
    const auto days = sys_days{ymd}.time_since_epoch().count();
    return static_cast<std::int64_t>(days) * 86400 + hh * 3600 + mm * 60 + ss - offset;
}

std::string format_iso8601(UtcSeconds t) {
    const std::int64_t days = floor_div(t, 86400);
    const std::int64_t sod = t - days * 86400;
    const year_month_day ymd{sys_days{std::chrono::days{days}}};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(sod / 3600), static_cast<int>(sod / 60 % 60), static_cast<int>(sod % 60));
    return buf;
}

std::string format_iso8601_local(UtcSeconds t, double utc_offset_hours) {
    const auto offset = static_cast<std::int64_t>(std::llround(utc_offset_hours * 3600.0));
    std::string text = format_iso8601(t + offset);
    text.pop_back();
    const std::int64_t mag = offset < 0 ? -offset : offset;
    char buf[16];
    std::snprintf(buf, sizeof buf, "%c%02d:%02d", offset < 0 ? '-' : '+', static_cast<int>(mag / 3600),
                  static_cast<int>(mag / 60 % 60));
    return text + buf;
}

int local_hour(UtcSeconds t, double utc_offset_hours) {
    const auto shifted = t + static_cast<std::int64_t>(std::llround(utc_offset_hours * 3600.0));
    return static_cast<int>((shifted - floor_div(shifted, 86400) * 86400) / 3600);
}

std::string add_days(std::string_view date, int days) {
    return local_date(local_midnight(date, 0.0) + static_cast<std::int64_t>(days) * 86400, 0.0);
}

std::string local_date(UtcSeconds t, double utc_offset_hours) {
    const auto shifted = t + static_cast<std::int64_t>(std::llround(utc_offset_hours * 3600.0));
    const year_month_day ymd{sys_days{std::chrono::days{floor_div(shifted, 86400)}}};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

UtcSeconds local_midnight(std::string_view date, double utc_offset_hours) {
    require(date.size() == 10, ErrorKind::Data, "bad date: '" + std::string(date) + "'");
    return parse_iso8601(std::string(date) + "T00:00:00") -
           static_cast<std::int64_t>(std::llround(utc_offset_hours * 3600.0));
}

UtcDayTime utc_day_time(UtcSeconds t) {
    const std::int64_t days = floor_div(t, 86400);
    const year_month_day ymd{sys_days{std::chrono::days{days}}};
    const sys_days jan1{ymd.year() / January / 1};
    const int doy = static_cast<int>(days - jan1.time_since_epoch().count()) + 1;
    return {static_cast<int>(ymd.year()), doy, static_cast<double>(t - days * 86400)};
}

}  // namespace pvsde
