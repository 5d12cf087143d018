#include <catch_amalgamated.hpp>

#include <fstream>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "pvsde/error.hpp"
#include "pvsde/pipeline.hpp"

using namespace pvsde;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunConfig small_config() {
    RunConfig c = parse_config(
        "seed = 3\n"
        "m = 8\n"
        "paths = 100\n"
        "synth.days = 16\n"
        "synth.start_date = 2019-04-01\n"
        "ensemble.hidden = 10\n"
        "ensemble.members = 4\n"
        "ensemble.min_pairs = 5\n");
    return c;
}

}  // namespace

TEST_CASE("date keys and splits", "[pipeline]") {
    CHECK(date_key("2019-01-02") == 20190102u);
    std::vector<std::string> dates;
    for (int d = 1; d <= 20; ++d) dates.push_back(add_days("2019-01-01", d));
    const auto [train, test] = split_dates(dates, 0.7, 9);
    CHECK(train.size() == 14);
    CHECK(test.size() == 6);
    CHECK(std::is_sorted(train.begin(), train.end()));
    std::set<std::string> all(train.begin(), train.end());
    all.insert(test.begin(), test.end());
    CHECK(all.size() == 20);
    CHECK(split_dates(dates, 0.7, 9) == std::make_pair(train, test));
    CHECK(split_dates(dates, 0.7, 10) != std::make_pair(train, test));
}

TEST_CASE("climatology fan stacks training days", "[pipeline]") {
    std::vector<DayWindow> days(3);
    for (std::size_t k = 0; k < 3; ++k) {
        days[k].values = {double(k), double(k) + 1, 5.0};
        days[k].mask = {true, true, k != 1};
    }
    const SimulationFan fan = climatology_fan(days, 30.0);
    CHECK(fan.n_paths() == 3);
    CHECK(fan.n_steps() == 3);
    CHECK(fan.paths()(1, 0) == 1.0);
    // The masked step takes the median of the unmasked ones.
    CHECK(fan.paths()(1, 2) == 5.0);
}

TEST_CASE("training pairs join params and weather by date", "[pipeline]") {
    ParamsDocument doc;
    doc.m = 1;
    doc.days["2019-01-02"].hours = {fixture::kTableI[0].theta};
    doc.days["2019-01-03"].hours = {fixture::kTableI[1].theta};
    doc.flags["2019-01-03"] = {kInterpolated};
    std::vector<WeatherDay> weather(2);
    weather[0].date = "2019-01-03";
    weather[1].date = "2019-01-04";
    for (auto& w : weather) {
        w.m = 1;
        w.feature_names = {"x"};
        w.features = {1.0};
    }
    const auto pairs = training_pairs(doc, weather, {"2019-01-02", "2019-01-03", "2019-01-04"});
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].weather.date == "2019-01-03");
    CHECK(pairs[0].flags == std::vector<std::uint32_t>{kInterpolated});
}

TEST_CASE("missing inputs are reported by kind", "[pipeline]") {
    fixture::TempDir dir("pipeline_err");
    RunConfig c = small_config();
    for (const char* cmd : {"identify", "train", "predict", "simulate", "evaluate", "e2e"}) {
        INFO(cmd);
        try {
            (void)run_command(cmd, c, dir.path());
            FAIL("ran without inputs");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Config);
        }
    }
    c.pv = dir.path() / "absent.csv";
    try {
        (void)cmd_identify(c, dir.path());
        FAIL("read a missing file");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Io);
    }
    REQUIRE_THROWS_AS(run_command("bogus", c, dir.path()), Error);
}

TEST_CASE("the command chain runs and reruns identically", "[pipeline]") {
    fixture::TempDir dir("pipeline_chain");
    const auto data = dir.path() / "data";
    RunConfig c = small_config();
    cmd_synth(c, data);

    auto chain = [&](const std::filesystem::path& out) {
        RunConfig r = c;
        r.pv = data / "pv.csv";
        r.weather = data / "weather.csv";
        cmd_identify(r, out / "id");
        r.params = out / "id" / "params.json";
        cmd_train(r, out / "model");
        r.model = out / "model";
        cmd_predict(r, out / "pred");
        r.params = out / "pred" / "predictions.json";
        const CommandResult sim = cmd_simulate(r, out / "fans");
        CHECK(sim.outputs.size() == 16);
        r.fan = out / "fans";
        const CommandResult ev = cmd_evaluate(r, out / "eval");
        CHECK(ev.summary.at("days") == 16);
        CHECK(read_json(out / "eval" / "metrics.json").contains("_mean"));
    };
    chain(dir.path() / "run1");
    chain(dir.path() / "run2");

    const ParamsDocument ident = read_params(dir.path() / "run1" / "id" / "params.json");
    CHECK(ident.m == 8);
    CHECK(ident.days.size() == 16);
    const ParamsDocument pred = read_params(dir.path() / "run1" / "pred" / "predictions.json");
    for (const auto& [date, day] : pred.days) REQUIRE_NOTHROW(day.validate());

    std::size_t compared = 0;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(dir.path() / "run1")) {
        if (!entry.is_regular_file()) continue;
        const auto rel = std::filesystem::relative(entry.path(), dir.path() / "run1");
        REQUIRE(slurp(entry.path()) == slurp(dir.path() / "run2" / rel));
        ++compared;
    }
    CHECK(compared > 30);
}
