#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "fixtures.hpp"
#include "pvsde/error.hpp"
#include "pvsde/metrics.hpp"

using namespace pvsde;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error thrown");
    return ErrorKind::Io;
}

SimulationFan cloudy_fan(std::size_t n_paths, std::uint64_t seed) {
    DayParams day;
    day.hours = {fixture::kTableI[1].theta, fixture::kTableI[1].theta, fixture::kTableI[1].theta,
                 fixture::kTableI[1].theta};
    return make_fan(day, std::nullopt, n_paths, seed);
}

}  // namespace

TEST_CASE("coverage, ND and NRMSE on hand cases", "[metrics]") {
    const std::vector<double> actual{1, 2, 3, 4};
    CHECK(picp({0, 0, 0, 0}, {2, 2, 2, 2}, actual) == Catch::Approx(0.5));
    CHECK(picp({1, 2, 3, 4}, {1, 2, 3, 4}, actual) == 1.0);
    CHECK(picp({0, 0, 0, 0}, {2, 2, 2, 2}, actual, {false, false, true, true}) == 0.0);
    CHECK(nd({1, 2, 3, 5}, actual) == Catch::Approx(0.1));
    CHECK(nd({2, 2}, {2, 2}) == 0.0);
    CHECK(nrmse({1, 3}, {2, 2}) == Catch::Approx(0.5));
    CHECK(nd({0, 2, 3, 4}, actual, {false, true, true, true}) == 0.0);
}

TEST_CASE("rho-risk at the median is the ND of the median", "[metrics]") {
    Rng rng(4);
    std::vector<double> q(300), a(300);
    for (std::size_t i = 0; i < q.size(); ++i) {
        q[i] = rng.uniform();
        a[i] = rng.uniform();
    }
    CHECK(rho_risk(q, a, 0.5) == Catch::Approx(nd(q, a)).epsilon(1e-12));
    // Over-forecasting is penalised by 1 - rho, under-forecasting by rho.
    CHECK(rho_risk({2.0}, {1.0}, 0.9) == Catch::Approx(2 * 0.1));
    CHECK(rho_risk({0.0}, {1.0}, 0.9) == Catch::Approx(2 * 0.9));
    CHECK(rho_risk(a, a, 0.9) == 0.0);
}

TEST_CASE("K-L divergence is zero on itself and positive otherwise", "[metrics]") {
    Rng rng(5);
    std::vector<double> x(5000), y(5000);
    for (auto& v : x) v = rng.uniform();
    for (auto& v : y) v = 0.5 * rng.uniform();
    CHECK(kl_divergence(x, x) == Catch::Approx(0.0).margin(1e-12));
    CHECK(kl_divergence(x, y) > 0.1);
    CHECK(kl_divergence(y, x) > kl_divergence(x, x));
    CHECK(std::isfinite(kl_divergence({0.0, 0.0}, {1.0, 1.0})));
}

TEST_CASE("autocorrelation of simple series", "[metrics]") {
    const auto flat = autocorrelation(std::vector<double>(50, 0.3), 5);
    CHECK(flat[0] == 1.0);
    for (std::size_t k = 1; k <= 5; ++k) CHECK(flat[k] == 0.0);
    Rng rng(6);
    std::vector<double> ar(200000);
    for (std::size_t i = 1; i < ar.size(); ++i) ar[i] = 0.8 * ar[i - 1] + rng.normal();
    const auto acf = autocorrelation(ar, 4);
    for (std::size_t k = 1; k <= 4; ++k) CHECK(acf[k] == Catch::Approx(std::pow(0.8, k)).margin(0.01));
    REQUIRE_THROWS_AS(autocorrelation({1.0, 2.0}, 3), Error);
}

TEST_CASE("longest unmasked run", "[metrics]") {
    CHECK(longest_unmasked_run(5, {}) == std::pair<std::size_t, std::size_t>{0, 5});
    const StepMask m{true, false, true, true, true, false, true, true};
    CHECK(longest_unmasked_run(m.size(), m) == std::pair<std::size_t, std::size_t>{2, 5});
}

TEST_CASE("a fan is well calibrated against its own draws", "[metrics]") {
    const SimulationFan fan = cloudy_fan(1000, 11);
    const SimulationFan other = cloudy_fan(400, 12);
    double cover = 0.0;
    for (Eigen::Index r = 0; r < other.paths().rows(); ++r) {
        const Eigen::VectorXd row = other.paths().row(r).transpose();
        cover += picp(fan, std::vector<double>(row.data(), row.data() + row.size())) / other.paths().rows();
    }
    CHECK(cover == Catch::Approx(0.90).margin(0.02));
    const Eigen::VectorXd first = other.paths().row(0).transpose();
    const std::vector<double> actual(first.data(), first.data() + first.size());
    const MetricReport r = evaluate(fan, actual);
    CHECK(r.n_samples == actual.size());
    CHECK(r.nd == Catch::Approx(nd(fan.quantile(0.5), actual)));
    CHECK(r.risk50 == Catch::Approx(r.nd).epsilon(1e-12));
    REQUIRE(r.acf_mismatch.has_value());
    CHECK(*r.acf_mismatch >= 0.0);
    // Hours of daylight only: the ACF run is too short and the metric is absent.
    StepMask mask(actual.size(), false);
    for (std::size_t i = 0; i < 200; ++i) mask[i] = true;
    CHECK_FALSE(evaluate(fan, actual, mask).acf_mismatch.has_value());
}

TEST_CASE("metric reports round-trip through JSON and CSV", "[metrics]") {
    MetricReport r;
    r.picp90 = 0.875;
    r.kl = 0.1234567890123;
    r.risk50 = 0.2;
    r.risk90 = 0.1;
    r.nd = 0.2;
    r.nrmse = 0.3;
    r.acf_mismatch = 0.4;
    r.n_samples = 1440;
    const MetricReport back = metric_report_from_json(nlohmann::json::parse(to_json(r).dump()));
    CHECK(back.kl == r.kl);
    CHECK(back.acf_mismatch == r.acf_mismatch);
    CHECK(back.n_samples == r.n_samples);
    r.acf_mismatch.reset();
    CHECK_FALSE(metric_report_from_json(to_json(r)).acf_mismatch.has_value());
    const std::string header = metric_csv_header();
    const std::string row = metric_csv_row("2019-01-02", r);
    CHECK(std::count(header.begin(), header.end(), ',') == std::count(row.begin(), row.end(), ','));
    CHECK(row.rfind("2019-01-02,", 0) == 0);
    REQUIRE_THROWS_AS(metric_report_from_json(nlohmann::json::object()), Error);
}

TEST_CASE("undefined and mismatched inputs raise typed errors", "[metrics]") {
    const std::vector<double> zeros(4, 0.0);
    CHECK(kind_of([&] { nd({1, 1, 1, 1}, zeros); }) == ErrorKind::UndefinedMetric);
    CHECK(kind_of([&] { nrmse({1, 1, 1, 1}, zeros); }) == ErrorKind::UndefinedMetric);
    CHECK(kind_of([&] { rho_risk({1, 1, 1, 1}, zeros, 0.5); }) == ErrorKind::UndefinedMetric);
    CHECK(kind_of([&] { picp({0}, {1}, {0.5}, {false}); }) == ErrorKind::UndefinedMetric);
    CHECK(kind_of([&] { nd({1, 2}, {1, 2, 3}); }) == ErrorKind::Dimension);
    CHECK(kind_of([&] { kl_divergence({}, {1.0}); }) == ErrorKind::UndefinedMetric);
    CHECK(kind_of([&] { rho_risk({1}, {1}, 1.0); }) == ErrorKind::Config);
}
