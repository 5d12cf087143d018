#include "pvsde/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pvsde/error.hpp"
#include "pvsde/parallel.hpp"

namespace pvsde {

void SdeParams::validate() const {
    require(std::isfinite(a) && std::isfinite(b) && std::isfinite(beta) && std::isfinite(c) && std::isfinite(d),
            ErrorKind::Data, "SDE parameters must be finite");
    require(a > 0.0, ErrorKind::Data, "SDE parameter a must be positive");
    require(beta >= 0.0, ErrorKind::Data, "SDE parameter beta must be non-negative");
    require(c < d, ErrorKind::Data, "SDE bounds must satisfy c < d");
    require(c <= b && b <= d, ErrorKind::Data, "SDE target b must lie in [c, d]");
}

void DayParams::validate() const {
    require(!hours.empty(), ErrorKind::Data, "DayParams needs at least one hour");
    for (const auto& h : hours) h.validate();
}

double drift(double p, const SdeParams& theta) { return theta.a * (theta.b - p); }

double diffusion(double p, const SdeParams& theta) {
    return std::sqrt(theta.beta * std::max(0.0, p - theta.c) * std::max(0.0, theta.d - p));
}

std::size_t SimulationOptions::steps_per_hour() const {
    const double n = 3600.0 / step_seconds;
    require(step_seconds > 0.0 && std::abs(n - std::round(n)) < 1e-9, ErrorKind::Config,
            "simulation step must divide 3600 s");
    return static_cast<std::size_t>(std::llround(n));
}

double SimulationOptions::internal_dt() const {
    return step_seconds / time_unit_seconds / static_cast<double>(substeps);
}

void SimulationOptions::validate() const {
    require(substeps >= 1, ErrorKind::Config, "substeps must be >= 1");
    require(time_unit_seconds > 0.0, ErrorKind::Config, "time unit must be positive");
    (void)steps_per_hour();
}

double clamp_start(double p, const SdeParams& theta) {
    const double eps = 1e-6 * (theta.d - theta.c);
    if (!std::isfinite(p)) p = theta.b;
    return std::clamp(p, theta.c + eps, theta.d - eps);
}

namespace {

// Advances one output step in place.
inline double advance(double p, const SdeParams& theta, double dt, double sqrt_dt, int substeps, Rng& rng) {
    for (int s = 0; s < substeps; ++s) {
        p += theta.a * (theta.b - p) * dt + diffusion(p, theta) * sqrt_dt * rng.normal();
        p = std::clamp(p, theta.c, theta.d);
    }
    return p;
}

void check_stability(const SdeParams& theta, double dt) {
    require(theta.a * dt <= 0.5, ErrorKind::Stability,
            "integration step too large: a*dt = " + std::to_string(theta.a * dt) + " > 0.5");
}

}  // namespace

std::vector<double> simulate_hour(const SdeParams& theta, double p0, std::size_t n_steps, Rng& rng,
                                  const SimulationOptions& options) {
    theta.validate();
    options.validate();
    const double dt = options.internal_dt();
    check_stability(theta, dt);
    const double sqrt_dt = std::sqrt(dt);
    std::vector<double> path(n_steps);
    double p = clamp_start(p0, theta);
    for (std::size_t i = 0; i < n_steps; ++i) {
        p = advance(p, theta, dt, sqrt_dt, options.substeps, rng);
        path[i] = p;
    }
    return path;
}

std::vector<double> simulate_day(const DayParams& params, double p0, Rng& rng, const SimulationOptions& options) {
    params.validate();
    options.validate();
    const std::size_t per_hour = options.steps_per_hour();
    const double dt = options.internal_dt();
    const double sqrt_dt = std::sqrt(dt);
    for (const auto& theta : params.hours) check_stability(theta, dt);

    std::vector<double> path(params.m() * per_hour);
    double p = p0;
    std::size_t k = 0;
    for (const auto& theta : params.hours) {
        const double eps = 1e-6 * (theta.d - theta.c);
        if (!std::isfinite(p) || p < theta.c + eps || p > theta.d - eps) p = clamp_start(p, theta);
        for (std::size_t i = 0; i < per_hour; ++i) {
            p = advance(p, theta, dt, sqrt_dt, options.substeps, rng);
            path[k++] = p;
        }
    }
    return path;
}

BetaShape stationary_shape(const SdeParams& theta) {
    theta.validate();
    require(theta.beta > 0.0, ErrorKind::Degenerate, "stationary law undefined for beta = 0");
    const double scale = theta.beta * (theta.d - theta.c);
    const BetaShape shape{2.0 * theta.a * (theta.b - theta.c) / scale, 2.0 * theta.a * (theta.d - theta.b) / scale};
    require(shape.alpha > 0.0 && shape.beta > 0.0, ErrorKind::Degenerate,
            "stationary law undefined when b sits on a bound");
    return shape;
}

double stationary_density(const SdeParams& theta, double p) {
    const BetaShape s = stationary_shape(theta);
    if (p <= theta.c || p >= theta.d) return 0.0;
    const double width = theta.d - theta.c;
    const double x = (p - theta.c) / width;
    const double log_norm = std::lgamma(s.alpha + s.beta) - std::lgamma(s.alpha) - std::lgamma(s.beta);
    return std::exp(log_norm + (s.alpha - 1.0) * std::log(x) + (s.beta - 1.0) * std::log1p(-x)) / width;
}

double stationary_sample(const SdeParams& theta, Rng& rng) {
    theta.validate();
    if (theta.beta <= 0.0 || theta.b <= theta.c || theta.b >= theta.d) return theta.b;
    const BetaShape s = stationary_shape(theta);
    return theta.c + (theta.d - theta.c) * rng.beta(s.alpha, s.beta);
}

double sorted_quantile(const std::vector<double>& sorted, double level) {
    require(!sorted.empty(), ErrorKind::Data, "quantile of empty sample");
    const double pos = std::clamp(level, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

SimulationFan::SimulationFan(Eigen::MatrixXd paths, double step_seconds, const std::vector<double>& levels)
    : paths_(std::move(paths)), step_seconds_(step_seconds) {
    const auto steps = static_cast<std::size_t>(paths_.cols());
    mean_.resize(steps);
    for (double level : levels) quantiles_[level].resize(steps);
    std::vector<double> column(static_cast<std::size_t>(paths_.rows()));
    for (std::size_t j = 0; j < steps; ++j) {
        const auto col = paths_.col(static_cast<Eigen::Index>(j));
        mean_[j] = col.mean();
        std::copy(col.data(), col.data() + col.size(), column.begin());
        std::sort(column.begin(), column.end());
        for (auto& [level, values] : quantiles_) values[j] = sorted_quantile(column, level);
    }
}

std::vector<double> SimulationFan::quantile(double level) const {
    if (auto it = quantiles_.find(level); it != quantiles_.end()) return it->second;
    std::vector<double> out(n_steps());
    std::vector<double> column(n_paths());
    for (std::size_t j = 0; j < n_steps(); ++j) {
        const auto col = paths_.col(static_cast<Eigen::Index>(j));
        std::copy(col.data(), col.data() + col.size(), column.begin());
        std::sort(column.begin(), column.end());
        out[j] = sorted_quantile(column, level);
    }
    return out;
}

SimulationFan make_fan(const DayParams& params, std::optional<double> p0, std::size_t n_paths, std::uint64_t seed,
                       const SimulationOptions& options, const std::vector<double>& levels) {
    require(n_paths >= 100, ErrorKind::Config, "a fan needs at least 100 paths");
    params.validate();
    const std::size_t steps = params.m() * options.steps_per_hour();
    Eigen::MatrixXd paths(static_cast<Eigen::Index>(n_paths), static_cast<Eigen::Index>(steps));
    parallel_for(n_paths, [&](std::size_t i) {
        Rng rng{seed, static_cast<std::uint64_t>(i)};
        const double start = p0 ? *p0 : stationary_sample(params.hours.front(), rng);
        const std::vector<double> path = simulate_day(params, start, rng, options);
        for (std::size_t j = 0; j < steps; ++j)
            paths(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = path[j];
    });
    return SimulationFan(std::move(paths), options.step_seconds, levels);
}

}  // namespace pvsde
