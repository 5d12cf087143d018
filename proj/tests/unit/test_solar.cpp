#include <catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "pvsde/error.hpp"
#include "pvsde/solar.hpp"

using namespace pvsde;

TEST_CASE("solar elevation agrees with an independent Meeus computation", "[solar]") {
    const SiteConfig sites[] = {{22.13, 113.55, 8.0, 2.9, 5.0}, {52.5, 13.4, 1.0, 1.0, 5.0}, {-33.9, 151.2, 10.0, 1.0, 5.0}};
    double worst = 0.0;
    for (const auto& site : sites)
        for (UtcSeconds t = parse_iso8601("2018-01-01T00:00:00Z"); t < parse_iso8601("2019-01-01T00:00:00Z");
             t += 7 * 86400 + 3 * 3600 + 1234)
            worst = std::max(worst, std::abs(solar_elevation(site, t) -
                                             oracle::meeus_elevation(site.latitude, site.longitude, t)));
    // The fractional-year series is good to about half a degree.
    CHECK(worst < 0.5);
}

TEST_CASE("noon sun at the equinox sits near 90 - latitude", "[solar]") {
    SiteConfig site{22.13, 113.55, 8.0, 2.9, 5.0};
    double best = -90.0;
    const UtcSeconds day = parse_iso8601("2018-03-20T00:00:00Z");
    for (UtcSeconds t = day; t < day + 86400; t += 60) best = std::max(best, solar_elevation(site, t));
    CHECK(std::abs(best - (90.0 - 22.13)) < 0.6);
}

TEST_CASE("equator equinox noon, midnight and a June morning", "[solar]") {
    const SiteConfig equator{0.0, 0.0, 0.0, 1.0, 5.0};
    double best = -90.0;
    const UtcSeconds day = parse_iso8601("2019-03-20T11:00:00Z");
    for (UtcSeconds t = day; t < day + 7200; t += 30) best = std::max(best, solar_elevation(equator, t));
    CHECK(best > 89.0);
    const SiteConfig macau;
    CHECK(solar_elevation(macau, local_midnight("2019-06-15", macau.utc_offset)) < 0.0);
    const double morning = solar_elevation(macau, parse_iso8601("2019-06-15T09:30:00+08:00"));
    CHECK(morning > macau.elevation_cutoff);
    CHECK(morning < 90.0);
    CHECK(solar_elevation(macau, 1560562200) == solar_elevation(macau, 1560562200));
}

TEST_CASE("sun position factor is sin(elevation)", "[solar]") {
    CHECK(sun_position_factor(90.0) == Catch::Approx(1.0));
    CHECK(sun_position_factor(30.0) == Catch::Approx(0.5));
    CHECK(sun_position_factor(0.0) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("normalize masks low sun and missing samples", "[solar]") {
    SiteConfig site;
    RawPvSeries raw;
    raw.start_timestamp = local_midnight("2018-06-01", site.utc_offset);
    raw.step_seconds = 300;
    raw.values.assign(288, 1.0);
    raw.values[150] = std::nan("");
    raw.values[151] = -1e-4;  // sensor noise
    const NormalizedPv pv = normalize(raw, site);
    REQUIRE(pv.mask.size() == raw.values.size());
    for (std::size_t i = 0; i < raw.values.size(); ++i) {
        const double elev = solar_elevation(site, raw.timestamp(i));
        if (i == 150 || elev <= site.elevation_cutoff) {
            REQUIRE_FALSE(pv.mask[i]);
            REQUIRE(pv.series.values[i] == 0.0);
        } else {
            REQUIRE(pv.mask[i]);
            REQUIRE(pv.series.values[i] >= 0.0);
            if (i != 151)
                REQUIRE(pv.series.values[i] ==
                        Catch::Approx(1.0 / (site.rated_power * std::sin(elev * oracle::kDeg))).epsilon(1e-12));
        }
    }
    REQUIRE(pv.series.values[151] == 0.0);
}

TEST_CASE("values above one are kept and over-rating is counted", "[solar]") {
    SiteConfig site;
    RawPvSeries raw;
    raw.start_timestamp = parse_iso8601("2018-06-01T04:30:00Z");  // 12:30 local
    raw.values = {site.rated_power * 1.2};
    const NormalizedPv pv = normalize(raw, site);
    REQUIRE(pv.mask[0]);
    CHECK(pv.series.values[0] > 1.0);
    CHECK(pv.over_rating == 1);
}

TEST_CASE("denormalize inverts normalize on daylight samples", "[solar]") {
    SiteConfig site;
    RawPvSeries raw;
    raw.start_timestamp = local_midnight("2018-09-10", site.utc_offset);
    raw.step_seconds = 30;
    for (int i = 0; i < 2880; ++i) raw.values.push_back(1.5 + std::sin(i * 0.01));
    const NormalizedPv pv = normalize(raw, site);
    const RawPvSeries back = denormalize(pv.series, site);
    for (std::size_t i = 0; i < raw.values.size(); ++i) {
        if (pv.mask[i])
            REQUIRE(back.values[i] == Catch::Approx(raw.values[i]).epsilon(1e-12));
        else
            REQUIRE(back.values[i] == 0.0);
    }
}

TEST_CASE("site validation rejects impossible coordinates", "[solar]") {
    SiteConfig site;
    site.latitude = 95;
    REQUIRE_THROWS_AS(site.validate(), Error);
    site = {};
    site.rated_power = 0;
    REQUIRE_THROWS_AS(site.validate(), Error);
    site = {};
    REQUIRE_THROWS_AS(solar_elevation(site, parse_iso8601("2150-01-01T00:00:00Z")), Error);
}
