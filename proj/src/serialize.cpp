#include "pvsde/serialize.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "pvsde/error.hpp"

namespace pvsde {

namespace {

constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int decode_char(char c) {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
}

static_assert(std::endian::native == std::endian::little, "model files assume a little-endian host");

std::string doubles_to_bytes(const double* data, std::size_t n) {
    std::string bytes(n * sizeof(double), '\0');
    std::memcpy(bytes.data(), data, bytes.size());
    return bytes;
}

}  // namespace

std::string base64_encode(std::string_view bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 2 < bytes.size(); i += 3) {
        const std::uint32_t v = (std::uint8_t(bytes[i]) << 16) | (std::uint8_t(bytes[i + 1]) << 8) |
                                std::uint8_t(bytes[i + 2]);
        out += kAlphabet[(v >> 18) & 63];
        out += kAlphabet[(v >> 12) & 63];
        out += kAlphabet[(v >> 6) & 63];
        out += kAlphabet[v & 63];
    }
    if (const std::size_t rest = bytes.size() - i; rest > 0) {
        std::uint32_t v = std::uint8_t(bytes[i]) << 16;
        if (rest == 2) v |= std::uint8_t(bytes[i + 1]) << 8;
        out += kAlphabet[(v >> 18) & 63];
        out += kAlphabet[(v >> 12) & 63];
        out += rest == 2 ? kAlphabet[(v >> 6) & 63] : '=';
        out += '=';
    }
    return out;
}

std::string base64_decode(std::string_view text) {
    require(text.size() % 4 == 0, ErrorKind::Data, "base64: length not a multiple of 4");
    std::string out;
    out.reserve(text.size() / 4 * 3);
    for (std::size_t i = 0; i < text.size(); i += 4) {
        std::array<int, 4> q{};
        int pad = 0;
        for (int k = 0; k < 4; ++k) {
            const char c = text[i + k];
            if (c == '=' && i + 4 == text.size() && k >= 2) {
                q[k] = 0;
                ++pad;
                continue;
            }
            q[k] = decode_char(c);
            require(q[k] >= 0 && pad == 0, ErrorKind::Data, "base64: invalid character");
        }
        const std::uint32_t v = (q[0] << 18) | (q[1] << 12) | (q[2] << 6) | q[3];
        out += static_cast<char>((v >> 16) & 0xFF);
        if (pad < 2) out += static_cast<char>((v >> 8) & 0xFF);
        if (pad < 1) out += static_cast<char>(v & 0xFF);
    }
    return out;
}

std::string encode_matrix(const Eigen::MatrixXd& m) {
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
    return base64_encode(doubles_to_bytes(rm.data(), static_cast<std::size_t>(rm.size())));
}

Eigen::MatrixXd decode_matrix(std::string_view text, Eigen::Index rows, Eigen::Index cols) {
    const std::string bytes = base64_decode(text);
    require(bytes.size() == static_cast<std::size_t>(rows * cols) * sizeof(double), ErrorKind::Data,
            "matrix payload size mismatch");
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(rows, cols);
    std::memcpy(rm.data(), bytes.data(), bytes.size());
    return rm;
}

std::string encode_vector(const Eigen::VectorXd& v) {
    return base64_encode(doubles_to_bytes(v.data(), static_cast<std::size_t>(v.size())));
}

Eigen::VectorXd decode_vector(std::string_view text, Eigen::Index size) {
    const std::string bytes = base64_decode(text);
    require(bytes.size() == static_cast<std::size_t>(size) * sizeof(double), ErrorKind::Data,
            "vector payload size mismatch");
    Eigen::VectorXd v(size);
    std::memcpy(v.data(), bytes.data(), bytes.size());
    return v;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        require(static_cast<bool>(out), ErrorKind::Io, "write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorKind::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string format_double(double v) {
    std::array<char, 32> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ec == std::errc{} ? end : buf.data());
}

}  // namespace pvsde
