#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pvsde/jacobi.hpp"

namespace pvsde {

/// Every metric takes an optional daylight mask; an empty mask means all
/// steps count. Masked steps are skipped.
using StepMask = std::vector<bool>;

/// Fraction of unmasked steps with lo <= actual <= hi.
double picp(const std::vector<double>& lo, const std::vector<double>& hi, const std::vector<double>& actual,
            const StepMask& mask = {});

/// Central interval of the fan: quantiles (1 - level) / 2 and (1 + level) / 2.
double picp(const SimulationFan& fan, const std::vector<double>& actual, const StepMask& mask = {},
            double level = 0.90);

/// D(actual || forecast) in nats between histograms on n_bins equal-width
/// bins spanning the union range, each bin probability smoothed by epsilon.
double kl_divergence(const std::vector<double>& forecast, const std::vector<double>& actual,
                     std::size_t n_bins = 50, double epsilon = 1e-9);

/// 2 sum (a - q)(rho 1{a > q} - (1 - rho) 1{a <= q}) / sum |a|.
/// Throws Error(UndefinedMetric) when sum |a| is zero.
double rho_risk(const std::vector<double>& quantile_path, const std::vector<double>& actual, double rho,
                const StepMask& mask = {});
double rho_risk(const SimulationFan& fan, const std::vector<double>& actual, double rho, const StepMask& mask = {});

/// sum |p - a| / sum |a|.
double nd(const std::vector<double>& point, const std::vector<double>& actual, const StepMask& mask = {});

/// sqrt(mean (p - a)^2) / mean |a|.
double nrmse(const std::vector<double>& point, const std::vector<double>& actual, const StepMask& mask = {});

/// Sample autocorrelation at lags 0..max_lag. A constant series has
/// autocorrelation 0 at every positive lag.
std::vector<double> autocorrelation(const std::vector<double>& x, std::size_t max_lag);

/// [begin, end) of the longest run of unmasked steps.
std::pair<std::size_t, std::size_t> longest_unmasked_run(std::size_t n, const StepMask& mask);

inline constexpr double kAcfDenominatorFloor = 0.05;

/// Mean over lags 1..window/step of |ACF_fan - ACF_actual| / max(|ACF_actual|, 0.05),
/// where ACF_fan averages the ACFs of at most max_paths fan paths. Both are
/// computed on the longest unmasked run, which must cover more than the
/// window. Throws Error(Data) otherwise.
double autocorr_mismatch(const SimulationFan& fan, const std::vector<double>& actual, const StepMask& mask = {},
                         double window_seconds = 3 * 3600.0, std::size_t max_paths = 200);

struct MetricOptions {
    double picp_level = 0.90;
    std::size_t kl_bins = 50;
    double kl_epsilon = 1e-9;
    double acf_window_seconds = 3 * 3600.0;
    std::size_t acf_max_paths = 200;
};

struct MetricReport {
    double picp90 = 0.0;
    double kl = 0.0;
    double risk50 = 0.0;
    double risk90 = 0.0;
    double nd = 0.0;
    double nrmse = 0.0;
    std::optional<double> acf_mismatch;  // absent when the daylight run is too short
    std::size_t n_samples = 0;
};

/// Full battery for one day. The point forecast is the fan's median path;
/// the forecast sample for the K-L divergence pools every path's unmasked
/// steps.
MetricReport evaluate(const SimulationFan& fan, const std::vector<double>& actual, const StepMask& mask = {},
                      const MetricOptions& options = {});

nlohmann::json to_json(const MetricReport& report);
MetricReport metric_report_from_json(const nlohmann::json& j);

/// CSV header and row (prefixed by a label column, e.g. the date).
std::string metric_csv_header();
std::string metric_csv_row(const std::string& label, const MetricReport& report);

}  // namespace pvsde
