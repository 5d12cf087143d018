#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <set>

#include "fixtures.hpp"
#include "pvsde/ensemble.hpp"
#include "pvsde/error.hpp"

using namespace pvsde;

namespace {

constexpr std::size_t kHours = 2;
constexpr std::size_t kFeatures = 3;

// Smooth ground-truth mapping from one hour's features to its parameters.
SdeParams truth_map(const double* x) {
    SdeParams t;
    t.a = 0.2 + 0.1 * std::sin(x[0]);
    t.b = 0.5 + 0.2 * std::cos(x[1]);
    t.beta = 0.1 + 0.05 * std::sin(x[0] + x[2]);
    t.c = 0.1 + 0.05 * std::sin(x[2]);
    t.d = 0.9 - 0.05 * std::cos(x[0]);
    return t;
}

std::vector<TrainingPair> synthetic_pairs(std::size_t n_days, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<TrainingPair> pairs;
    for (std::size_t k = 0; k < n_days; ++k) {
        TrainingPair tp;
        tp.weather.date = "day" + std::to_string(k);
        tp.weather.m = kHours;
        tp.weather.feature_names = {"x0", "x1", "x2"};
        for (std::size_t i = 0; i < kHours * kFeatures; ++i) tp.weather.features.push_back(2 * rng.uniform() - 1);
        for (std::size_t h = 0; h < kHours; ++h) tp.params.hours.push_back(truth_map(&tp.weather.features[h * kFeatures]));
        pairs.push_back(std::move(tp));
    }
    return pairs;
}

EnsembleOptions small_options() {
    EnsembleOptions opt;
    opt.hidden = 30;
    opt.members = 8;
    opt.seed = 4;
    return opt;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("trimmed mean drops the tails", "[ensemble]") {
    CHECK(trimmed_mean({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 0.2) == Catch::Approx(5.5));
    CHECK(trimmed_mean({3, 1, 2}, 0.0) == Catch::Approx(2.0));
    // floor(0.2 * 4) = 0 values are trimmed.
    CHECK(trimmed_mean({1, 2, 3, 100}, 0.2) == Catch::Approx(26.5));
    std::vector<double> v(200, 0.5);
    v[17] = 1e6;
    CHECK(trimmed_mean(v, 0.2) == 0.5);
}

TEST_CASE("trimmed mean is shift-equivariant and order-free", "[ensemble]") {
    Rng rng(2);
    std::vector<double> v(57);
    for (auto& x : v) x = rng.normal();
    const double base = trimmed_mean(v, 0.2);
    std::vector<double> shifted = v;
    for (auto& x : shifted) x += 3.25;
    CHECK(trimmed_mean(shifted, 0.2) == Catch::Approx(base + 3.25));
    std::vector<double> perm = v;
    std::reverse(perm.begin(), perm.end());
    std::rotate(perm.begin(), perm.begin() + 11, perm.end());
    CHECK(trimmed_mean(perm, 0.2) == base);
    std::vector<double> raised = v;
    for (auto& x : raised) x = std::max(x, 0.0);
    CHECK(trimmed_mean(raised, 0.2) >= base);
}

TEST_CASE("bootstrap covers about 63.2 percent of distinct indices", "[ensemble]") {
    Rng rng(7);
    double frac = 0;
    const std::size_t n = 479;
    for (int r = 0; r < 50; ++r) {
        const auto idx = bootstrap_indices(n, rng);
        REQUIRE(idx.size() == n);
        REQUIRE(*std::max_element(idx.begin(), idx.end()) < n);
        frac += static_cast<double>(std::set<std::size_t>(idx.begin(), idx.end()).size()) / n / 50;
    }
    CHECK(std::abs(frac - (1 - std::exp(-1.0))) < 0.02);
    const auto one = bootstrap_indices(1, rng);
    REQUIRE(one == std::vector<std::size_t>{0});

    TrainSet t;
    t.inputs = Eigen::MatrixXd::Random(5, 2);
    t.targets = Eigen::VectorXd::LinSpaced(5, 0, 4);
    Rng a(3), b(3);
    const TrainSet r = bootstrap_resample(t, a);
    const auto ri = bootstrap_indices(5, b);
    for (std::size_t i = 0; i < 5; ++i) {
        REQUIRE(r.targets(static_cast<Eigen::Index>(i)) == t.targets(static_cast<Eigen::Index>(ri[i])));
        REQUIRE(r.inputs.row(static_cast<Eigen::Index>(i)) == t.inputs.row(static_cast<Eigen::Index>(ri[i])));
    }
}

TEST_CASE("projection yields valid and stable parameters", "[ensemble]") {
    Rng rng(9);
    for (int k = 0; k < 500; ++k) {
        SdeParams t{rng.normal(), 3 * rng.normal(), rng.normal(), 2 * rng.normal(), 2 * rng.normal()};
        std::vector<ProjectionEvent> events;
        const SdeParams p = project_params(t, 3, &events);
        REQUIRE_NOTHROW(p.validate());
        REQUIRE(p.d - p.c >= kMinBoundGap - 1e-15);
        REQUIRE(p.beta <= kBetaMax);
        REQUIRE(project_params(p) == p);
        for (const auto& e : events) REQUIRE(e.hour == 3);
    }
    const SdeParams good = fixture::kTableI[1].theta;
    std::vector<ProjectionEvent> none;
    REQUIRE(project_params(good, 0, &none) == good);
    REQUIRE(none.empty());
}

TEST_CASE("slot labels and parameter access", "[ensemble]") {
    CHECK(slot_label(0) == "hour 1 a");
    CHECK(slot_label(57) == "hour 12 beta");
    SdeParams t = fixture::kTableI[0].theta;
    for (std::size_t j = 0; j < kParamsPerHour; ++j) set_param_value(t, j, static_cast<double>(j));
    CHECK(param_value(t, 3) == 3.0);
    CHECK(t.d == 4.0);
}

TEST_CASE("ensemble has one model per slot and member", "[ensemble]") {
    const auto pairs = synthetic_pairs(40, 1);
    EnsembleTrainReport report;
    const EnsembleModel model = train_ensemble(pairs, small_options(), &report);
    CHECK(model.slots.size() == kHours * kParamsPerHour);
    CHECK(model.n_models() == kHours * kParamsPerHour * 8);
    CHECK(model.input_dim() == kHours * kFeatures);
    CHECK(report.slot_rmse.size() == model.slots.size());
    CHECK(report.fallback_slots.empty());
    CHECK(model.first_training_date == "day0");
    for (const auto& s : model.slots) {
        CHECK(s.n_pairs == 40);
        CHECK(s.output_weights.rows() == 8);
        CHECK(s.output_weights.cols() == 30);
    }
    // Predictions are the trimmed mean of the members' outputs.
    const auto outs = member_outputs(model, 6, pairs[0].weather);
    CHECK(predict_slot(model, 6, pairs[0].weather) == Catch::Approx(trimmed_mean(outs, 0.2)));
}

TEST_CASE("a single untrimmed member is a plain ELM", "[ensemble]") {
    const auto pairs = synthetic_pairs(30, 2);
    EnsembleOptions opt = small_options();
    opt.members = 1;
    opt.trim_fraction = 0.0;
    const EnsembleModel model = train_ensemble(pairs, opt);
    for (std::size_t slot : {0u, 4u, 9u}) {
        const ElmModel elm = member_model(model, slot, 0);
        for (std::size_t k = 0; k < 3; ++k)
            CHECK(predict_slot(model, slot, pairs[k].weather) ==
                  Catch::Approx(elm_predict(elm, slot_input(model, slot, pairs[k].weather))).epsilon(1e-12));
    }
}

TEST_CASE("held-out slot error on a smooth mapping", "[ensemble]") {
    const auto pairs = synthetic_pairs(400, 3);
    const std::vector<TrainingPair> train(pairs.begin(), pairs.begin() + 280);
    EnsembleOptions opt;
    opt.members = 20;
    opt.seed = 8;
    const EnsembleModel model = train_ensemble(train, opt);
    double worst = 0.0;
    for (std::size_t slot = 0; slot < model.slots.size(); ++slot) {
        double se = 0, st = 0;
        for (std::size_t k = 280; k < pairs.size(); ++k) {
            const double t = param_value(pairs[k].params.hours[slot / kParamsPerHour], slot % kParamsPerHour);
            const double e = predict_slot(model, slot, pairs[k].weather) - t;
            se += e * e;
            st += t * t;
        }
        worst = std::max(worst, std::sqrt(se / st));
    }
    CHECK(worst <= 0.10);
}

TEST_CASE("flagged hours are excluded or fall back to every pair", "[ensemble]") {
    auto pairs = synthetic_pairs(30, 4);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        // Hour 1 flagged on a third of the days, hour 2 on all of them.
        pairs[k].flags = {k % 3 == 0 ? kInterpolated : 0u, kInterpolated};
    }
    EnsembleTrainReport report;
    const EnsembleModel model = train_ensemble(pairs, small_options(), &report);
    for (std::size_t j = 0; j < kParamsPerHour; ++j) {
        CHECK(model.slots[j].n_pairs == 20);
        CHECK(model.slots[kParamsPerHour + j].n_pairs == 30);
    }
    std::vector<std::size_t> expect(kParamsPerHour);
    std::iota(expect.begin(), expect.end(), kParamsPerHour);
    CHECK(report.fallback_slots == expect);

    const std::vector<TrainingPair> few(pairs.begin(), pairs.begin() + 9);
    try {
        (void)train_ensemble(few, small_options());
        FAIL("expected a training error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Training);
    }
}

TEST_CASE("hour-local inputs use one hour's features", "[ensemble]") {
    const auto pairs = synthetic_pairs(30, 5);
    EnsembleOptions opt = small_options();
    opt.hour_local = true;
    const EnsembleModel model = train_ensemble(pairs, opt);
    CHECK(model.input_dim() == kFeatures);
    const Eigen::VectorXd x = slot_input(model, 7, pairs[2].weather);
    REQUIRE(x.size() == 3);
    for (std::size_t j = 0; j < kFeatures; ++j) CHECK(x(static_cast<Eigen::Index>(j)) == pairs[2].weather.features[kFeatures + j]);
}

TEST_CASE("predictions project onto valid parameters", "[ensemble]") {
    const auto pairs = synthetic_pairs(30, 6);
    const EnsembleModel model = train_ensemble(pairs, small_options());
    std::vector<WeatherDay> days;
    for (const auto& p : pairs) days.push_back(p.weather);
    const auto batch = predict_days(model, days);
    REQUIRE(batch.size() == days.size());
    for (std::size_t k = 0; k < days.size(); ++k) {
        REQUIRE_NOTHROW(batch[k].params.validate());
        const DayPrediction single = predict_day_params(model, days[k]);
        REQUIRE(single.params.hours == batch[k].params.hours);
    }
    WeatherDay bad = days[0];
    bad.features.pop_back();
    REQUIRE_THROWS_AS(predict_day_params(model, bad), Error);
}

TEST_CASE("training is reproducible and save/load is exact", "[ensemble]") {
    const auto pairs = synthetic_pairs(25, 7);
    const EnsembleModel a = train_ensemble(pairs, small_options());
    const EnsembleModel b = train_ensemble(pairs, small_options());
    fixture::TempDir dir("ensemble");
    save_ensemble(a, dir.path() / "a");
    save_ensemble(b, dir.path() / "b");
    for (const auto& entry : std::filesystem::directory_iterator(dir.path() / "a"))
        REQUIRE(slurp(entry.path()) == slurp(dir.path() / "b" / entry.path().filename()));
    const EnsembleModel back = load_ensemble(dir.path() / "a");
    for (std::size_t slot = 0; slot < a.slots.size(); ++slot)
        REQUIRE(predict_slot(back, slot, pairs[1].weather) == predict_slot(a, slot, pairs[1].weather));
    REQUIRE_THROWS_AS(load_ensemble(dir.path() / "missing"), Error);
}
