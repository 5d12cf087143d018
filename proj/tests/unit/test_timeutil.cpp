#include <catch_amalgamated.hpp>

#include "pvsde/error.hpp"
#include "pvsde/timeutil.hpp"

using namespace pvsde;

TEST_CASE("ISO-8601 parsing handles zones and optional seconds", "[timeutil]") {
    REQUIRE(parse_iso8601("1970-01-01T00:00:00Z") == 0);
    REQUIRE(parse_iso8601("1970-01-02 00:00") == 86400);
    REQUIRE(parse_iso8601("2018-03-31T10:00:00+08:00") == parse_iso8601("2018-03-31T02:00:00Z"));
    REQUIRE(parse_iso8601("2018-03-31T10:00:00-05:30") == parse_iso8601("2018-03-31T15:30:00Z"));
    // 2000-03-01 is day 11017 after the epoch (leap day included).
    REQUIRE(parse_iso8601("2000-03-01T00:00:00Z") == 11017LL * 86400);
}

TEST_CASE("malformed timestamps are data errors", "[timeutil]") {
    for (const char* bad : {"", "2018-13-01T00:00:00", "2018-03-31T25:00:00", "2018/03/31 10:00", "2018-03-31T10:00:00+8"})
        REQUIRE_THROWS_AS(parse_iso8601(bad), Error);
}

TEST_CASE("format round-trips through parse", "[timeutil]") {
    for (UtcSeconds t : {UtcSeconds{0}, UtcSeconds{1522461600}, UtcSeconds{4102444799}}) {
        REQUIRE(parse_iso8601(format_iso8601(t)) == t);
        REQUIRE(parse_iso8601(format_iso8601_local(t, 8.0)) == t);
        REQUIRE(parse_iso8601(format_iso8601_local(t, -3.5)) == t);
    }
    REQUIRE(format_iso8601_local(parse_iso8601("2018-03-31T02:00:00Z"), 8.0) == "2018-03-31T10:00:00+08:00");
}

TEST_CASE("local calendar helpers", "[timeutil]") {
    const UtcSeconds t = parse_iso8601("2018-12-31T17:30:00Z");
    REQUIRE(local_date(t, 8.0) == "2019-01-01");
    REQUIRE(local_hour(t, 8.0) == 1);
    REQUIRE(local_midnight("2019-01-01", 8.0) == parse_iso8601("2018-12-31T16:00:00Z"));
    REQUIRE(add_days("2020-02-28", 1) == "2020-02-29");
    REQUIRE(add_days("2019-02-28", 1) == "2019-03-01");
    REQUIRE(add_days("2019-12-31", 1) == "2020-01-01");
    REQUIRE(add_days("2019-03-01", -1) == "2019-02-28");
    const UtcDayTime dt = utc_day_time(parse_iso8601("2020-12-31T06:00:00Z"));
    REQUIRE(dt.year == 2020);
    REQUIRE(dt.day_of_year == 366);
    REQUIRE(dt.seconds_of_day == 6 * 3600.0);
}
