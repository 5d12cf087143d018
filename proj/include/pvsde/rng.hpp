#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace pvsde {

/// Seeded random stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The variate transforms (uniform, normal, gamma, beta) are
/// implemented here rather than taken from <random> because the standard
/// distributions are allowed to differ between library implementations,
/// and ensemble model files regenerate their frozen input weights from
/// stored seeds.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    /// Stream keyed by a tuple, e.g. (master seed, slot, member).
    Rng(std::initializer_list<std::uint64_t> key);

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1).
    double uniform();

    /// Uniform integer on [0, n).
    std::size_t index(std::size_t n);

    double normal();
    double gamma(double shape);
    double beta(double alpha, double beta);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Mixes a key tuple into a single 64-bit seed (splitmix64 finalizer chain).
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> key);

}  // namespace pvsde
