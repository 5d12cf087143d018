#include <catch_amalgamated.hpp>

#include <fstream>

#include "fixtures.hpp"
#include "pvsde/artifacts.hpp"
#include "pvsde/error.hpp"

using namespace pvsde;

namespace {

ParamsDocument sample_doc() {
    ParamsDocument doc;
    doc.grid_start_hour = 7;
    doc.m = 2;
    doc.days["2019-01-02"].hours = {fixture::kTableI[0].theta, fixture::kTableI[2].theta};
    doc.days["2019-01-03"].hours = {fixture::kTableI[1].theta, fixture::kTableI[3].theta};
    doc.flags["2019-01-02"] = {0u, kInterpolated | kNonVolatile};
    doc.projections["2019-01-03"] = {{1, "beta clamped"}};
    return doc;
}

}  // namespace

TEST_CASE("params documents round-trip exactly", "[artifacts]") {
    const ParamsDocument doc = sample_doc();
    const auto j = params_to_json(doc);
    CHECK(j.contains("_meta"));
    CHECK(j.at("2019-01-02").size() == 2);
    const ParamsDocument back = params_from_json(nlohmann::json::parse(j.dump()));
    CHECK(back.grid_start_hour == 7);
    CHECK(back.m == 2);
    CHECK(back.days.at("2019-01-02").hours == doc.days.at("2019-01-02").hours);
    CHECK(back.flags.at("2019-01-02") == doc.flags.at("2019-01-02"));
    REQUIRE(back.projections.at("2019-01-03").size() == 1);
    CHECK(back.projections.at("2019-01-03")[0].what == "beta clamped");

    fixture::TempDir dir("params");
    write_params(dir.path() / "p.json", doc);
    CHECK(read_params(dir.path() / "p.json").days.at("2019-01-03").hours == doc.days.at("2019-01-03").hours);

    auto bad = j;
    bad["2019-01-02"][0]["a"] = -1.0;
    REQUIRE_THROWS_AS(params_from_json(bad), Error);
    auto short_day = j;
    short_day["2019-01-02"].erase(1);
    REQUIRE_THROWS_AS(params_from_json(short_day), Error);
}

TEST_CASE("quantile column names", "[artifacts]") {
    CHECK(quantile_column(0.05) == "q05");
    CHECK(quantile_column(0.5) == "q50");
    CHECK(quantile_column(0.95) == "q95");
}

TEST_CASE("a fan regenerates bit-exactly from its meta file", "[artifacts]") {
    FanMeta meta;
    meta.date = "2019-01-02";
    meta.start = local_midnight(meta.date, 8.0) + 7 * 3600;
    meta.grid_start_hour = 7;
    meta.n_paths = 120;
    meta.seed = 1234;
    meta.params.hours = {fixture::kTableI[1].theta, fixture::kTableI[3].theta};
    const SimulationFan fan = make_fan(meta.params, std::nullopt, meta.n_paths, meta.seed, meta.simulation_options());

    fixture::TempDir dir("fan");
    write_fan(dir.path(), fan, meta, 8.0);
    const auto metas = read_fan_metas(dir.path());
    REQUIRE(metas.size() == 1);
    const SimulationFan again = regenerate_fan(metas[0]);
    CHECK(again.paths() == fan.paths());
    CHECK(read_fan_metas(dir.path() / "fan_2019-01-02.meta.json").size() == 1);

    std::ifstream csv(dir.path() / "fan_2019-01-02.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "step,timestamp,mean,q05,q25,q50,q75,q95");
    std::size_t rows = 0;
    for (std::string line; std::getline(csv, line);) ++rows;
    CHECK(rows == fan.n_steps());
    REQUIRE_THROWS_AS(read_fan_metas(dir.path() / "nothing_here"), Error);
}
