#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "fixtures.hpp"
#include "pvsde/error.hpp"
#include "pvsde/serialize.hpp"

using namespace pvsde;

TEST_CASE("base64 matches the standard test vectors", "[serialize]") {
    const std::pair<const char*, const char*> cases[] = {
        {"", ""}, {"f", "Zg=="}, {"fo", "Zm8="}, {"foo", "Zm9v"}, {"foob", "Zm9vYg=="}, {"fooba", "Zm9vYmE="},
        {"foobar", "Zm9vYmFy"}};
    for (const auto& [plain, coded] : cases) {
        CHECK(base64_encode(plain) == coded);
        CHECK(base64_decode(coded) == plain);
    }
    REQUIRE_THROWS_AS(base64_decode("Zm9v!"), Error);
}

TEST_CASE("matrices round-trip bit for bit", "[serialize]") {
    Eigen::MatrixXd m(3, 4);
    for (int i = 0; i < 12; ++i) m(i / 4, i % 4) = std::sin(i * 1.7) * std::pow(10.0, i - 6);
    m(0, 0) = -0.0;
    m(2, 3) = std::numeric_limits<double>::denorm_min();
    const Eigen::MatrixXd back = decode_matrix(encode_matrix(m), 3, 4);
    REQUIRE(back == m);
    REQUIRE(std::signbit(back(0, 0)));
    REQUIRE_THROWS_AS(decode_matrix(encode_matrix(m), 4, 4), Error);
    Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(7, -1, 1);
    REQUIRE(decode_vector(encode_vector(v), 7) == v);
}

TEST_CASE("row-major little-endian layout", "[serialize]") {
    Eigen::MatrixXd m(1, 2);
    m << 1.0, 2.0;
    const std::string raw = base64_decode(encode_matrix(m));
    REQUIRE(raw.size() == 16);
    // 1.0 = 0x3FF0000000000000, low byte first.
    CHECK(static_cast<unsigned char>(raw[7]) == 0x3F);
    CHECK(static_cast<unsigned char>(raw[6]) == 0xF0);
    CHECK(static_cast<unsigned char>(raw[15]) == 0x40);
}

TEST_CASE("atomic writes create parents and leave no temp file", "[serialize]") {
    fixture::TempDir dir("ser");
    const auto path = dir.path() / "a" / "b" / "x.txt";
    write_file_atomic(path, "hello");
    REQUIRE(read_file(path) == "hello");
    write_file_atomic(path, "again");
    REQUIRE(read_file(path) == "again");
    std::size_t n = 0;
    for (const auto& e : std::filesystem::directory_iterator(path.parent_path())) n += e.is_regular_file();
    REQUIRE(n == 1);
    REQUIRE_THROWS_AS(read_file(dir.path() / "missing"), Error);
}

TEST_CASE("shortest round-trip decimal formatting", "[serialize]") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(2.0) == "2");
    const double x = 0.1 + 0.2;
    CHECK(std::stod(format_double(x)) == x);
}
