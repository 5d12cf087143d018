#include <catch_amalgamated.hpp>

#include <cmath>
#include <string>

#include "pvsde/error.hpp"
#include "pvsde/timeutil.hpp"
#include "pvsde/weather.hpp"

using namespace pvsde;

namespace {

WeatherRecord record(const std::string& when, double temperature) {
    WeatherRecord r;
    r.timestamp = parse_iso8601(when);
    r.temperature = temperature;
    r.humidity = 70;
    r.pressure = 1010;
    r.wind_speed = 3;
    r.wind_direction = 90;
    r.cloud_okta = 4;
    r.irradiance = 1.2;
    return r;
}

}  // namespace

TEST_CASE("16-point compass labels", "[weather]") {
    const char* labels[] = {"N", "NNE", "NE", "ENE", "E", "ESE", "SE", "SSE",
                            "S", "SSW", "SW", "WSW", "W", "WNW", "NW", "NNW"};
    for (int i = 0; i < 16; ++i) {
        CHECK(parse_wind_direction(labels[i]) == 22.5 * i);
        CHECK(compass_label(22.5 * i) == labels[i]);
    }
    CHECK(parse_wind_direction("sse") == 157.5);
    CHECK(parse_wind_direction("123.5") == 123.5);
    CHECK_FALSE(parse_wind_direction("").has_value());
    CHECK(compass_label(359.0) == "N");
    CHECK(compass_label(-22.5) == "NNW");
    REQUIRE_THROWS_AS(parse_wind_direction("NORTHISH"), Error);
    REQUIRE_THROWS_AS(parse_wind_direction("400"), Error);
}

TEST_CASE("wind direction is encoded as sin and cos", "[weather]") {
    const auto enc = encode_weather(record("2019-01-01T10:00:00+08:00", 20.0));
    CHECK(enc[5] == Catch::Approx(1.0));
    CHECK(enc[6] == Catch::Approx(0.0).margin(1e-12));
    CHECK(weather_feature_names().size() == enc.size());
}

TEST_CASE("weather CSV round-trips and reports bad lines", "[weather]") {
    const std::vector<WeatherRecord> recs{record("2019-01-01T10:00:00+08:00", 20.5),
                                          record("2019-01-01T11:00:00+08:00", std::nan(""))};
    const auto back = parse_weather_csv(format_weather_csv(recs, 8.0));
    REQUIRE(back.size() == 2);
    CHECK(back[0].timestamp == recs[0].timestamp);
    CHECK(back[0].temperature == 20.5);
    CHECK(back[0].wind_direction == 90.0);
    CHECK(std::isnan(back[1].temperature));

    const std::string header = std::string(kWeatherCsvHeader) + "\n";
    const std::string good = "2019-01-01T10:00:00+08:00,20,70,1010,0,3,E,4,1.2\n";
    for (const std::string& bad : {std::string("2019-01-01T11:00:00+08:00,20,170,1010,0,3,E,4,1.2\n"),
                                   std::string("2019-01-01T11:00:00+08:00,20,70,1010,0,3,E,4\n"),
                                   std::string("2019-01-01T11:00:00+08:00,20,70,1010,0,3,XYZ,4,1.2\n"),
                                   std::string("2019-01-01T11:00:00+08:00,abc,70,1010,0,3,E,4,1.2\n")}) {
        try {
            (void)parse_weather_csv(header + good + bad, "w.csv");
            FAIL("accepted " << bad);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Data);
            CHECK(std::string(e.what()).find("w.csv:3") != std::string::npos);
        }
    }
    REQUIRE_THROWS_AS(parse_weather_csv("timestamp,temperature\n"), Error);
}

TEST_CASE("grouping picks grid hours and drops sparse days", "[weather]") {
    std::vector<WeatherRecord> recs;
    for (int h = 0; h < 24; ++h) {
        const std::string hh = (h < 10 ? "0" : "") + std::to_string(h);
        recs.push_back(record("2019-01-01T" + hh + ":00:00+08:00", h));
        if (h == 9) recs.push_back(record("2019-01-02T" + hh + ":00:00+08:00", 100.0 + h));
    }
    const WeatherDays wd = group_weather_days(recs, 8.0, 8, 3);
    REQUIRE(wd.days.size() == 1);
    CHECK(wd.days[0].date == "2019-01-01");
    CHECK(wd.days[0].features.size() == 27);
    CHECK(wd.days[0].features[0] == 8.0);
    CHECK(wd.days[0].features[9] == 9.0);
    REQUIRE(wd.warnings.size() == 1);
    CHECK(wd.warnings[0].find("2019-01-02") != std::string::npos);

    // With every gap tolerated the sparse day is kept, holes as NaN.
    const WeatherDays all = group_weather_days(recs, 8.0, 8, 3, 1.0);
    REQUIRE(all.days.size() == 2);
    CHECK(std::isnan(all.days[1].features[0]));
    CHECK(all.days[1].features[9] == 109.0);

    recs.push_back(recs.front());
    REQUIRE_THROWS_AS(group_weather_days(recs, 8.0, 8, 3), Error);
}

TEST_CASE("imputer fills gaps with training medians", "[weather]") {
    std::vector<WeatherDay> days(3);
    const double vals[3][2] = {{1, 10}, {5, std::nan("")}, {3, 30}};
    for (int k = 0; k < 3; ++k) {
        days[k].m = 1;
        days[k].feature_names = {"u", "v"};
        days[k].features = {vals[k][0], vals[k][1]};
    }
    const WeatherImputer imp = WeatherImputer::fit(days);
    CHECK(imp.medians == std::vector<double>{3, 20});
    WeatherDay d = days[1];
    CHECK(imp.apply(d) == 1);
    CHECK(d.features[1] == 20.0);
    CHECK(imp.apply(d) == 0);
    d.features.push_back(1.0);
    REQUIRE_THROWS_AS(imp.apply(d), Error);
    REQUIRE_THROWS_AS(WeatherImputer::fit({}), Error);
}
