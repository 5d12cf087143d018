#include <catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <vector>

#include "pvsde/rng.hpp"

using pvsde::Rng;

TEST_CASE("same key gives the same stream", "[rng]") {
    Rng a{42, 3, 7};
    Rng b{42, 3, 7};
    for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());
    Rng c(123);
    Rng d(123);
    for (int i = 0; i < 100; ++i) REQUIRE(c.normal() == d.normal());
}

TEST_CASE("different keys give different streams", "[rng]") {
    std::set<std::uint64_t> firsts;
    for (std::uint64_t s = 0; s < 10; ++s)
        for (std::uint64_t m = 0; m < 10; ++m) firsts.insert(Rng{1, s, m}.next_u64());
    REQUIRE(firsts.size() == 100);
    REQUIRE(pvsde::derive_seed({1, 2}) != pvsde::derive_seed({2, 1}));
}

TEST_CASE("uniform and index stay in range", "[rng]") {
    Rng rng(5);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        REQUIRE(rng.index(7) < 7);
    }
}

TEST_CASE("variate moments match their laws", "[rng]") {
    Rng rng(2024);
    const int n = 200000;
    double s = 0, s2 = 0, g = 0, bs = 0, bs2 = 0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        s += z;
        s2 += z * z;
        g += rng.gamma(2.5);
        const double x = rng.beta(2.0, 5.0);
        REQUIRE(x > 0.0);
        REQUIRE(x < 1.0);
        bs += x;
        bs2 += x * x;
    }
    CHECK(std::abs(s / n) < 0.01);
    CHECK(std::abs(s2 / n - 1.0) < 0.02);
    CHECK(std::abs(g / n - 2.5) < 0.02);
    // Beta(2, 5): mean 2/7, variance 10 / (49 * 8).
    const double mean = bs / n;
    CHECK(std::abs(mean - 2.0 / 7.0) < 0.003);
    CHECK(std::abs(bs2 / n - mean * mean - 10.0 / 392.0) < 0.001);
}

TEST_CASE("gamma with shape below one stays positive with the right mean", "[rng]") {
    Rng rng(9);
    double s = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = rng.gamma(0.3);
        REQUIRE(x >= 0.0);
        s += x;
    }
    CHECK(std::abs(s / n - 0.3) < 0.01);
}

TEST_CASE("index is close to uniform", "[rng]") {
    Rng rng(77);
    std::vector<int> counts(10, 0);
    for (int i = 0; i < 100000; ++i) ++counts[rng.index(10)];
    for (int c : counts) CHECK(std::abs(c - 10000) < 500);
}
