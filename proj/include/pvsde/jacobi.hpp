#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "pvsde/rng.hpp"

namespace pvsde {

/// Time unit of the rate parameters a and beta, in seconds. Rates are
/// stored per 30 s sampling step, which is the scale at which the
/// identified hourly parameters of real PV telemetry take magnitudes
/// a ~ 0.05-0.35. Simulation and estimation divide wall-clock intervals by
/// this constant before using them as dt or h.
inline constexpr double kModelTimeUnitSeconds = 30.0;

/// One hour's Jacobi diffusion
///   dP = a (b - P) dt + sqrt(beta (P - c)(d - P)) dW.
struct SdeParams {
    double a = 0.1;
    double b = 0.5;
    double beta = 0.0;
    double c = 0.0;
    double d = 1.0;

    /// Throws Error(Data) unless a > 0, beta >= 0, c < d and c <= b <= d.
    void validate() const;

    bool operator==(const SdeParams&) const = default;
};

/// Hourly parameters for the daytime hours of one day.
struct DayParams {
    std::vector<SdeParams> hours;

    std::size_t m() const { return hours.size(); }
    void validate() const;
};

double drift(double p, const SdeParams& theta);
double diffusion(double p, const SdeParams& theta);

struct SimulationOptions {
    /// Output sampling step in seconds. Must divide 3600.
    double step_seconds = 30.0;
    /// Euler-Maruyama substeps per output step.
    int substeps = 10;
    double time_unit_seconds = kModelTimeUnitSeconds;

    std::size_t steps_per_hour() const;
    /// Integrator step in model time units.
    double internal_dt() const;
    void validate() const;
};

/// Clamps a starting state into [c + eps, d - eps] with eps = 1e-6 (d - c).
double clamp_start(double p, const SdeParams& theta);

/// Euler-Maruyama path with post-step clamping to [c, d]. The returned
/// vector holds the n_steps states after each output step (p0 excluded).
/// Throws Error(Stability) when a * dt > 0.5 for the internal step.
std::vector<double> simulate_hour(const SdeParams& theta, double p0, std::size_t n_steps, Rng& rng,
                                  const SimulationOptions& options = {});

/// Concatenated hourly segments; each hour starts from the previous hour's
/// last state, clamped into the new bounds when it falls outside them.
/// Length m * steps_per_hour.
std::vector<double> simulate_day(const DayParams& params, double p0, Rng& rng,
                                 const SimulationOptions& options = {});

struct BetaShape {
    double alpha;
    double beta;
};

/// Shape parameters of the stationary law, a Beta distribution on [c, d].
/// Throws Error(Degenerate) when beta == 0 or b sits on a bound.
BetaShape stationary_shape(const SdeParams& theta);

/// Density of the stationary law at p (zero outside (c, d)).
double stationary_density(const SdeParams& theta, double p);

/// Draw from the stationary law; returns b for non-volatile hours.
double stationary_sample(const SdeParams& theta, Rng& rng);

inline const std::vector<double> kDefaultFanLevels{0.05, 0.25, 0.5, 0.75, 0.95};

/// Monte-Carlo paths for one day and their per-step summaries.
class SimulationFan {
public:
    SimulationFan(Eigen::MatrixXd paths, double step_seconds, const std::vector<double>& levels);

    /// n_paths x n_steps.
    const Eigen::MatrixXd& paths() const { return paths_; }
    std::size_t n_paths() const { return static_cast<std::size_t>(paths_.rows()); }
    std::size_t n_steps() const { return static_cast<std::size_t>(paths_.cols()); }
    double step_seconds() const { return step_seconds_; }
    const std::vector<double>& mean() const { return mean_; }
    const std::map<double, std::vector<double>>& quantiles() const { return quantiles_; }

    /// Cached path for a precomputed level, otherwise computed from paths.
    std::vector<double> quantile(double level) const;

private:
    Eigen::MatrixXd paths_;
    double step_seconds_;
    std::vector<double> mean_;
    std::map<double, std::vector<double>> quantiles_;
};

/// Empirical quantile with linear interpolation between order statistics.
/// `sorted` must be ascending and nonempty.
double sorted_quantile(const std::vector<double>& sorted, double level);

/// Simulates n_paths day paths. Path i uses the stream Rng{seed, i}; when
/// p0 is absent each path starts from a draw of hour 1's stationary law.
SimulationFan make_fan(const DayParams& params, std::optional<double> p0, std::size_t n_paths,
                       std::uint64_t seed, const SimulationOptions& options = {},
                       const std::vector<double>& levels = kDefaultFanLevels);

}  // namespace pvsde
