#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "pvsde/jacobi.hpp"
#include "pvsde/optimize.hpp"

namespace pvsde {

/// One hour of normalized samples at period h_seconds (night samples
/// already removed upstream).
struct HourSamples {
    std::vector<double> values;
    double h_seconds = 30.0;
};

enum FitFlag : std::uint32_t {
    kFitOk = 0,
    kNonVolatile = 1u << 0,      // constant series, beta forced to 0
    kDriftDegenerate = 1u << 1,  // no excitation; a = a_min
    kDriftLeastSquares = 1u << 2,  // beta = 0, relaxation least squares used
    kNotConverged = 1u << 3,
    kInterpolated = 1u << 4,     // window invalid, parameters from neighbours
};

std::vector<std::string> flag_names(std::uint32_t flags);
std::uint32_t parse_flag(const std::string& name);

struct EstimationOptions {
    double time_unit_seconds = kModelTimeUnitSeconds;
    /// Physical box for the bounds: normalized power is non-negative and
    /// stays below the ceiling unless the data itself exceeds it.
    double bound_floor = 0.0;
    double bound_ceiling = 1.5;
    double a_min = 1e-4;
    double a_max = 2.0;
    double variance_floor = 1e-10;
    std::size_t min_samples = 20;
    NelderMeadOptions optimizer{};
};

struct DiffusionFit {
    double c = 0.0;
    double d = 1.0;
    double beta = 0.0;
    double objective = 0.0;          // sum of squared isometry residuals
    double initial_objective = 0.0;
    std::size_t iterations = 0;
    bool converged = true;
    bool non_volatile = false;
};

struct DriftFit {
    double a = 0.0;
    double b = 0.0;
    double objective = 0.0;          // squared norm of the estimating equations
    double initial_objective = 0.0;
    std::size_t iterations = 0;
    bool converged = true;
    bool degenerate = false;
    bool least_squares = false;
};

struct FitReport {
    SdeParams params;
    double diffusion_objective = 0.0;
    double drift_objective = 0.0;
    std::size_t iterations = 0;
    bool converged = true;
    std::uint32_t flags = kFitOk;
};

/// Diffusion step: least-squares fit of squared increments to
/// h beta (P - c)(d - P) subject to c <= min(P), d >= max(P), beta >= 0.
DiffusionFit estimate_diffusion(const HourSamples& samples, const EstimationOptions& options = {});

/// Drift step: root of the martingale estimating equations for (a, b)
/// given the diffusion parameters, with the conditional mean expanded to
/// second order in h. Falls back to plain least squares when beta = 0.
DriftFit estimate_drift(const HourSamples& samples, double c, double d, double beta,
                        const EstimationOptions& options = {});

FitReport identify_hour(const HourSamples& samples, const EstimationOptions& options = {});

struct DayFit {
    DayParams params;
    std::vector<FitReport> reports;
};

/// Splits a day window of m hours into hourly windows and fits each one
/// independently. Windows with more than half of their samples masked, or
/// fewer than min_samples contiguous usable samples, are marked
/// interpolated and take the mean of the nearest valid neighbours.
/// Throws Error(Data) when every hour is invalid.
DayFit identify_day(const std::vector<double>& values, const std::vector<bool>& mask, std::size_t m,
                    double step_seconds, const EstimationOptions& options = {});

}  // namespace pvsde
