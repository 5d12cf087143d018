#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pvsde {

enum class ErrorKind {
    Config,
    Data,
    Stability,
    Degenerate,
    Dimension,
    Training,
    UndefinedMetric,
    Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Base error for the library. Every failure carries a kind so the CLI can
/// report it as machine-readable JSON.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& message) {
    if (!condition) throw Error(kind, message);
}

}  // namespace pvsde
