#pragma once

#include <array>
#include <filesystem>
#include <random>
#include <string>

#include "pvsde/jacobi.hpp"

namespace fixture {

struct NamedParams {
    const char* name;
    pvsde::SdeParams theta;
};

// Identified parameters of the four typical hours (clear, partly cloudy,
// rainy, overcast), written out here independently of the library table.
inline const std::array<NamedParams, 4> kTableI{{
    {"clear", {0.3298, 0.8333, 0.0348, 0.6895, 0.8477}},
    {"cloudy", {0.2095, 0.5496, 0.1946, 0.1263, 0.9930}},
    {"rainy", {0.0760, 0.0519, 0.0519, 0.0, 0.3143}},
    {"overcast", {0.0461, 0.3547, 0.1064, 0.2267, 0.6209}},
}};

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("pvsde_" + tag + "_" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace fixture
