#include <catch_amalgamated.hpp>

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "pvsde/parallel.hpp"

using namespace pvsde;

TEST_CASE("every index runs exactly once", "[parallel]") {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), [&](std::size_t i) { ++hits[i]; });
    for (const auto& h : hits) REQUIRE(h.load() == 1);
    parallel_for(0, [](std::size_t) { FAIL("body called for n = 0"); });
}

TEST_CASE("nested loops run every inner index", "[parallel]") {
    std::vector<std::atomic<int>> hits(20 * 30);
    parallel_for(20, [&](std::size_t i) { parallel_for(30, [&](std::size_t j) { ++hits[i * 30 + j]; }); });
    for (const auto& h : hits) REQUIRE(h.load() == 1);
}

TEST_CASE("the first exception propagates", "[parallel]") {
    REQUIRE_THROWS_AS(parallel_for(100,
                                   [](std::size_t i) {
                                       if (i == 37) throw std::runtime_error("boom");
                                   }),
                      std::runtime_error);
}

TEST_CASE("PVSDE_THREADS caps the worker count", "[parallel]") {
    const char* old = std::getenv("PVSDE_THREADS");
    const std::string saved = old ? old : "";
    setenv("PVSDE_THREADS", "1", 1);
    CHECK(thread_count() == 1);
    setenv("PVSDE_THREADS", "junk", 1);
    CHECK(thread_count() >= 1);
    if (old)
        setenv("PVSDE_THREADS", saved.c_str(), 1);
    else
        unsetenv("PVSDE_THREADS");
}
