#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace pvsde {

/// Seconds since the Unix epoch, UTC.
using UtcSeconds = std::int64_t;

/// Parses `YYYY-MM-DD[T ]HH:MM[:SS][Z|+HH:MM|-HH:MM]`. Without a zone
/// designator the time is taken as UTC. Throws Error(Data) on bad input.
UtcSeconds parse_iso8601(std::string_view text);

/// `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_iso8601(UtcSeconds t);

/// Local wall-clock time with its offset, `YYYY-MM-DDTHH:MM:SS+HH:MM`.
std::string format_iso8601_local(UtcSeconds t, double utc_offset_hours);

/// Local clock hour [0, 24) of an instant.
int local_hour(UtcSeconds t, double utc_offset_hours);

/// `YYYY-MM-DD` of the civil date `days` after `date`.
std::string add_days(std::string_view date, int days);

/// Civil date `YYYY-MM-DD` of an instant shifted by a UTC offset in hours.
std::string local_date(UtcSeconds t, double utc_offset_hours);

/// UTC instant of local midnight for a civil date `YYYY-MM-DD`.
UtcSeconds local_midnight(std::string_view date, double utc_offset_hours);

/// Day of year (1-based) and UTC seconds into the day.
struct UtcDayTime {
    int year;
    int day_of_year;
    double seconds_of_day;
};
UtcDayTime utc_day_time(UtcSeconds t);

}  // namespace pvsde
