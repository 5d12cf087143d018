#include "pvsde/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "pvsde/error.hpp"
#include "pvsde/serialize.hpp"

namespace pvsde {

namespace {

bool counts(const StepMask& mask, std::size_t t) { return mask.empty() || mask[t]; }

void check_aligned(std::size_t n, const std::vector<double>& actual, const StepMask& mask) {
    require(n == actual.size(), ErrorKind::Dimension,
            "forecast has " + std::to_string(n) + " steps, actual has " + std::to_string(actual.size()));
    require(mask.empty() || mask.size() == actual.size(), ErrorKind::Dimension, "mask length mismatch");
    bool any = false;
    for (std::size_t t = 0; t < actual.size() && !any; ++t) any = counts(mask, t);
    require(any, ErrorKind::UndefinedMetric, "no unmasked samples to evaluate");
}

double abs_sum(const std::vector<double>& actual, const StepMask& mask) {
    double s = 0.0;
    for (std::size_t t = 0; t < actual.size(); ++t)
        if (counts(mask, t)) s += std::abs(actual[t]);
    return s;
}

std::vector<double> histogram(const std::vector<double>& x, double lo, double width, std::size_t n_bins,
                              double epsilon) {
    std::vector<double> p(n_bins, 0.0);
    for (double v : x) {
        std::size_t k = width > 0.0 ? static_cast<std::size_t>((v - lo) / width) : 0;
        p[std::min(k, n_bins - 1)] += 1.0;
    }
    const double norm = static_cast<double>(x.size()) * (1.0 + static_cast<double>(n_bins) * epsilon);
    for (double& v : p) v = (v + epsilon * static_cast<double>(x.size())) / norm;
    return p;
}

}  // namespace

double picp(const std::vector<double>& lo, const std::vector<double>& hi, const std::vector<double>& actual,
            const StepMask& mask) {
    check_aligned(lo.size(), actual, mask);
    check_aligned(hi.size(), actual, mask);
    std::size_t inside = 0, total = 0;
    for (std::size_t t = 0; t < actual.size(); ++t) {
        if (!counts(mask, t)) continue;
        ++total;
        if (lo[t] <= actual[t] && actual[t] <= hi[t]) ++inside;
    }
    return static_cast<double>(inside) / static_cast<double>(total);
}

double picp(const SimulationFan& fan, const std::vector<double>& actual, const StepMask& mask, double level) {
    require(level > 0.0 && level < 1.0, ErrorKind::Config, "PICP level must be in (0, 1)");
    return picp(fan.quantile(0.5 * (1.0 - level)), fan.quantile(0.5 * (1.0 + level)), actual, mask);
}

double kl_divergence(const std::vector<double>& forecast, const std::vector<double>& actual, std::size_t n_bins,
                     double epsilon) {
    require(!forecast.empty() && !actual.empty(), ErrorKind::UndefinedMetric, "K-L divergence of an empty sample");
    require(n_bins >= 1 && epsilon > 0.0, ErrorKind::Config, "K-L needs n_bins >= 1 and epsilon > 0");
    const auto [f_lo, f_hi] = std::minmax_element(forecast.begin(), forecast.end());
    const auto [a_lo, a_hi] = std::minmax_element(actual.begin(), actual.end());
    const double lo = std::min(*f_lo, *a_lo);
    const double hi = std::max(*f_hi, *a_hi);
    const double width = (hi - lo) / static_cast<double>(n_bins);
    const auto pf = histogram(forecast, lo, width, n_bins, epsilon);
    const auto pa = histogram(actual, lo, width, n_bins, epsilon);
    double kl = 0.0;
    for (std::size_t k = 0; k < n_bins; ++k) kl += pa[k] * std::log(pa[k] / pf[k]);
    return std::max(kl, 0.0);
}

double rho_risk(const std::vector<double>& quantile_path, const std::vector<double>& actual, double rho,
                const StepMask& mask) {
    require(rho > 0.0 && rho < 1.0, ErrorKind::Config, "rho must be in (0, 1)");
    check_aligned(quantile_path.size(), actual, mask);
    const double denom = abs_sum(actual, mask);
    require(denom > 0.0, ErrorKind::UndefinedMetric, "rho-risk undefined: actual power sums to zero");
    double loss = 0.0;
    for (std::size_t t = 0; t < actual.size(); ++t) {
        if (!counts(mask, t)) continue;
        const double diff = actual[t] - quantile_path[t];
        loss += diff * (actual[t] > quantile_path[t] ? rho : -(1.0 - rho));
    }
    return 2.0 * loss / denom;
}

double rho_risk(const SimulationFan& fan, const std::vector<double>& actual, double rho, const StepMask& mask) {
    return rho_risk(fan.quantile(rho), actual, rho, mask);
}

double nd(const std::vector<double>& point, const std::vector<double>& actual, const StepMask& mask) {
    check_aligned(point.size(), actual, mask);
    const double denom = abs_sum(actual, mask);
    require(denom > 0.0, ErrorKind::UndefinedMetric, "ND undefined: actual power sums to zero");
    double num = 0.0;
    for (std::size_t t = 0; t < actual.size(); ++t)
        if (counts(mask, t)) num += std::abs(point[t] - actual[t]);
    return num / denom;
}

double nrmse(const std::vector<double>& point, const std::vector<double>& actual, const StepMask& mask) {
    check_aligned(point.size(), actual, mask);
    const double denom = abs_sum(actual, mask);
    require(denom > 0.0, ErrorKind::UndefinedMetric, "NRMSE undefined: actual power sums to zero");
    double sq = 0.0;
    std::size_t n = 0;
    for (std::size_t t = 0; t < actual.size(); ++t) {
        if (!counts(mask, t)) continue;
        sq += (point[t] - actual[t]) * (point[t] - actual[t]);
        ++n;
    }
    const double mean_abs = denom / static_cast<double>(n);
    return std::sqrt(sq / static_cast<double>(n)) / mean_abs;
}

std::vector<double> autocorrelation(const std::vector<double>& x, std::size_t max_lag) {
    require(x.size() > max_lag, ErrorKind::Data, "series shorter than the requested lag");
    std::vector<double> acf(max_lag + 1, 0.0);
    acf[0] = 1.0;
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); })) return acf;
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    std::vector<double> centered(x.size());
    for (std::size_t t = 0; t < x.size(); ++t) centered[t] = x[t] - mean;
    double var = 0.0;
    for (double v : centered) var += v * v;
    if (var <= 0.0) return acf;
    for (std::size_t lag = 1; lag <= max_lag; ++lag) {
        double s = 0.0;
        for (std::size_t t = 0; t + lag < centered.size(); ++t) s += centered[t] * centered[t + lag];
        acf[lag] = s / var;
    }
    return acf;
}

std::pair<std::size_t, std::size_t> longest_unmasked_run(std::size_t n, const StepMask& mask) {
    std::pair<std::size_t, std::size_t> best{0, 0};
    std::size_t start = 0;
    for (std::size_t t = 0; t <= n; ++t) {
        if (t < n && counts(mask, t)) continue;
        if (t - start > best.second - best.first) best = {start, t};
        start = t + 1;
    }
    return best;
}

double autocorr_mismatch(const SimulationFan& fan, const std::vector<double>& actual, const StepMask& mask,
                         double window_seconds, std::size_t max_paths) {
    check_aligned(fan.n_steps(), actual, mask);
    require(max_paths >= 1, ErrorKind::Config, "ACF needs at least one path");
    const auto lags = static_cast<std::size_t>(std::llround(window_seconds / fan.step_seconds()));
    require(lags >= 1, ErrorKind::Config, "ACF window shorter than one step");
    const auto [begin, end] = longest_unmasked_run(actual.size(), mask);
    require(end - begin > lags, ErrorKind::Data,
            "longest daylight run (" + std::to_string(end - begin) + " steps) does not cover the ACF window");

    const auto acf_actual = autocorrelation(std::vector<double>(actual.begin() + begin, actual.begin() + end), lags);
    const std::size_t n_paths = std::min(max_paths, fan.n_paths());
    std::vector<double> acf_fan(lags + 1, 0.0);
    std::vector<double> segment(end - begin);
    for (std::size_t i = 0; i < n_paths; ++i) {
        for (std::size_t t = begin; t < end; ++t)
            segment[t - begin] = fan.paths()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t));
        const auto acf = autocorrelation(segment, lags);
        for (std::size_t lag = 0; lag <= lags; ++lag) acf_fan[lag] += acf[lag] / static_cast<double>(n_paths);
    }
    double total = 0.0;
    for (std::size_t lag = 1; lag <= lags; ++lag)
        total += std::abs(acf_fan[lag] - acf_actual[lag]) / std::max(std::abs(acf_actual[lag]), kAcfDenominatorFloor);
    return total / static_cast<double>(lags);
}

MetricReport evaluate(const SimulationFan& fan, const std::vector<double>& actual, const StepMask& mask,
                      const MetricOptions& options) {
    check_aligned(fan.n_steps(), actual, mask);
    MetricReport r;
    r.picp90 = picp(fan, actual, mask, options.picp_level);

    std::vector<double> forecast_sample, actual_sample;
    for (std::size_t t = 0; t < actual.size(); ++t) {
        if (!counts(mask, t)) continue;
        actual_sample.push_back(actual[t]);
        for (Eigen::Index i = 0; i < fan.paths().rows(); ++i)
            forecast_sample.push_back(fan.paths()(i, static_cast<Eigen::Index>(t)));
    }
    r.n_samples = actual_sample.size();
    r.kl = kl_divergence(forecast_sample, actual_sample, options.kl_bins, options.kl_epsilon);

    const auto median = fan.quantile(0.5);
    r.risk50 = rho_risk(median, actual, 0.5, mask);
    r.risk90 = rho_risk(fan.quantile(0.9), actual, 0.9, mask);
    r.nd = nd(median, actual, mask);
    r.nrmse = nrmse(median, actual, mask);
    const auto [begin, end] = longest_unmasked_run(actual.size(), mask);
    const auto lags = static_cast<std::size_t>(std::llround(options.acf_window_seconds / fan.step_seconds()));
    if (end - begin > lags)
        r.acf_mismatch = autocorr_mismatch(fan, actual, mask, options.acf_window_seconds, options.acf_max_paths);
    return r;
}

nlohmann::json to_json(const MetricReport& r) {
    nlohmann::json j;
    j["PICP90"] = r.picp90;
    j["KL"] = r.kl;
    j["risk50"] = r.risk50;
    j["risk90"] = r.risk90;
    j["ND"] = r.nd;
    j["NRMSE"] = r.nrmse;
    j["ACF_mismatch"] = r.acf_mismatch ? nlohmann::json(*r.acf_mismatch) : nlohmann::json(nullptr);
    j["n_samples"] = r.n_samples;
    return j;
}

MetricReport metric_report_from_json(const nlohmann::json& j) {
    MetricReport r;
    try {
        r.picp90 = j.at("PICP90").get<double>();
        r.kl = j.at("KL").get<double>();
        r.risk50 = j.at("risk50").get<double>();
        r.risk90 = j.at("risk90").get<double>();
        r.nd = j.at("ND").get<double>();
        r.nrmse = j.at("NRMSE").get<double>();
        if (!j.at("ACF_mismatch").is_null()) r.acf_mismatch = j["ACF_mismatch"].get<double>();
        r.n_samples = j.at("n_samples").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Data, std::string("malformed metric report: ") + e.what());
    }
    return r;
}

std::string metric_csv_header() { return "label,PICP90,KL,risk50,risk90,ND,NRMSE,ACF_mismatch,n_samples"; }

std::string metric_csv_row(const std::string& label, const MetricReport& r) {
    return label + "," + format_double(r.picp90) + "," + format_double(r.kl) + "," + format_double(r.risk50) + "," +
           format_double(r.risk90) + "," + format_double(r.nd) + "," + format_double(r.nrmse) + "," +
           (r.acf_mismatch ? format_double(*r.acf_mismatch) : std::string()) + "," + std::to_string(r.n_samples);
}

}  // namespace pvsde
