#include "pvsde/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>

#include "pvsde/error.hpp"
#include "pvsde/parallel.hpp"

namespace pvsde {

namespace {

constexpr double kDegenerateRange = 1e-6;
constexpr double kDegenerateMargin = 0.01;

struct Standardized {
    std::vector<double> u;  // (P - lo) / range
    double lo = 0.0;
    double range = 1.0;
    double h = 1.0;         // sampling period in model time units
};

void check_samples(const HourSamples& samples, const EstimationOptions& options) {
    require(samples.values.size() >= options.min_samples, ErrorKind::Data,
            "an hour needs at least " + std::to_string(options.min_samples) + " samples");
    require(samples.h_seconds > 0.0, ErrorKind::Data, "sampling period must be positive");
    for (double v : samples.values) require(std::isfinite(v), ErrorKind::Data, "non-finite sample");
}

Standardized standardize(const HourSamples& samples, const EstimationOptions& options) {
    const auto [mn, mx] = std::minmax_element(samples.values.begin(), samples.values.end());
    Standardized s;
    s.lo = *mn;
    s.range = *mx - *mn;
    s.h = samples.h_seconds / options.time_unit_seconds;
    const double scale = s.range > 0.0 ? s.range : 1.0;
    s.u.reserve(samples.values.size());
    for (double v : samples.values) s.u.push_back((v - s.lo) / scale);
    return s;
}

double lag1_autocorrelation(const std::vector<double>& x) {
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        den += (x[i] - mean) * (x[i] - mean);
        if (i + 1 < x.size()) num += (x[i] - mean) * (x[i + 1] - mean);
    }
    return den > 0.0 ? num / den : 0.0;
}

// (a, b) solving sum w r = 0 and sum w u r = 0 for r = du - h phi + h theta u,
// or nothing when the line implies no mean reversion or a > 1/h.
std::optional<std::vector<double>> linear_drift_root(const std::vector<double>& u, const std::vector<double>& w,
                                                     double h) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, t0 = 0.0, t1 = 0.0;
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
        const double y = u[i + 1] - u[i];
        s0 += w[i];
        s1 += w[i] * u[i];
        s2 += w[i] * u[i] * u[i];
        t0 += w[i] * y;
        t1 += w[i] * u[i] * y;
    }
    const double det = s0 * s2 - s1 * s1;
    if (!(std::abs(det) > 1e-300)) return std::nullopt;
    const double intercept = (t0 * s2 - t1 * s1) / det;
    const double slope = (s0 * t1 - s1 * t0) / det;
    const double theta = -slope / h;
    if (!(theta > 0.0) || 2.0 * h * theta > 1.0) return std::nullopt;
    const double a = (1.0 - std::sqrt(1.0 - 2.0 * h * theta)) / h;
    const double b = intercept / (h * theta);
    if (!std::isfinite(a) || !std::isfinite(b)) return std::nullopt;
    return std::vector<double>{a, b};
}

}  // namespace

std::vector<std::string> flag_names(std::uint32_t flags) {
    std::vector<std::string> names;
    if (flags & kNonVolatile) names.emplace_back("non_volatile");
    if (flags & kDriftDegenerate) names.emplace_back("drift_degenerate");
    if (flags & kDriftLeastSquares) names.emplace_back("drift_least_squares");
    if (flags & kNotConverged) names.emplace_back("not_converged");
    if (flags & kInterpolated) names.emplace_back("interpolated");
    return names;
}

std::uint32_t parse_flag(const std::string& name) {
    if (name == "non_volatile") return kNonVolatile;
    if (name == "drift_degenerate") return kDriftDegenerate;
    if (name == "drift_least_squares") return kDriftLeastSquares;
    if (name == "not_converged") return kNotConverged;
    if (name == "interpolated") return kInterpolated;
    throw Error(ErrorKind::Data, "unknown fit flag '" + name + "'");
}

DiffusionFit estimate_diffusion(const HourSamples& samples, const EstimationOptions& options) {
    check_samples(samples, options);
    const Standardized s = standardize(samples, options);
    const double mn = s.lo;
    const double mx = s.lo + s.range;

    DiffusionFit fit;
    if (s.range <= kDegenerateRange) {
        fit.c = mn - kDegenerateMargin;
        fit.d = mx + kDegenerateMargin;
        fit.beta = 0.0;
        fit.non_volatile = true;
        return fit;
    }

    const std::size_t n = s.u.size() - 1;
    std::vector<double> inc2(n);
    for (std::size_t i = 0; i < n; ++i) inc2[i] = (s.u[i + 1] - s.u[i]) * (s.u[i + 1] - s.u[i]);

    // Feasible box in standardized units.
    const double c_lo = std::min(0.0, (options.bound_floor - s.lo) / s.range);
    const double d_hi = std::max(1.0, (options.bound_ceiling - s.lo) / s.range);
    auto project = [&](std::vector<double>& x) {
        x[0] = std::clamp(x[0], c_lo, 0.0);
        x[1] = std::clamp(x[1], 1.0, d_hi);
        x[2] = std::max(x[2], 0.0);
    };
    auto objective = [&](const std::vector<double>& x) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = inc2[i] - s.h * x[2] * (s.u[i] - x[0]) * (x[1] - s.u[i]);
            sum += r * r;
        }
        return sum;
    };

    std::vector<double> x0{-0.05, 1.05, 0.0};
    project(x0);
    double mean_inc2 = 0.0, mean_span = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_inc2 += inc2[i];
        mean_span += (s.u[i] - x0[0]) * (x0[1] - s.u[i]);
    }
    x0[2] = mean_inc2 / (s.h * mean_span);

    const std::vector<double> steps{0.1, 0.1, 0.5 * x0[2] + 1e-12};
    fit.initial_objective = objective(x0);
    const NelderMeadResult r = nelder_mead(objective, project, x0, steps, options.optimizer);
    // Scale factor range^4 maps the standardized objective back to data units.
    const double r4 = std::pow(s.range, 4);
    fit.c = s.lo + r.x[0] * s.range;
    fit.d = s.lo + r.x[1] * s.range;
    fit.beta = r.x[2];
    fit.objective = r.value * r4;
    fit.initial_objective *= r4;
    fit.iterations = r.iterations;
    fit.converged = r.converged;
    // Bound containment must hold exactly after the affine map back.
    fit.c = std::min(fit.c, mn);
    fit.d = std::max(fit.d, mx);
    return fit;
}

DriftFit estimate_drift(const HourSamples& samples, double c, double d, double beta,
                        const EstimationOptions& options) {
    check_samples(samples, options);
    require(beta >= 0.0 && c < d, ErrorKind::Data, "estimate_drift: invalid diffusion parameters");
    const Standardized s = standardize(samples, options);
    const double mean = std::accumulate(samples.values.begin(), samples.values.end(), 0.0) /
                        static_cast<double>(samples.values.size());

    DriftFit fit;
    if (s.range <= kDegenerateRange) {
        fit.a = options.a_min;
        fit.b = std::clamp(mean, c, d);
        fit.degenerate = true;
        return fit;
    }

    const double cu = (c - s.lo) / s.range;
    const double du = (d - s.lo) / s.range;
    const double var_floor = options.variance_floor / (s.range * s.range);
    const std::size_t n = s.u.size() - 1;
    const double h = s.h;

    std::vector<double> weight(n);
    for (std::size_t i = 0; i < n; ++i)
        weight[i] = 1.0 / std::max(beta * (s.u[i] - cu) * (du - s.u[i]), var_floor);

    // E[P_{i+1} | P_i] ~ P_i + h mu + h^2/2 mu dmu/dP, and dmu/dP = -a.
    auto residual = [&](double a, double b, std::size_t i) {
        const double mu = a * (b - s.u[i]);
        return s.u[i + 1] - (s.u[i] + h * mu - 0.5 * h * h * a * mu);
    };

    auto project = [&](std::vector<double>& x) {
        x[0] = std::clamp(x[0], options.a_min, options.a_max);
        x[1] = std::clamp(x[1], cu, du);
    };

    std::function<double(const std::vector<double>&)> objective;
    if (beta > 0.0) {
        // Estimating equations: sum_i (dmu/dtheta / sigma^2)(P_{i+1} - E[...]) = 0
        // with dmu/da = b - P and dmu/db = a. The a factor is dropped from the
        // second equation (a > 0 on the box), which leaves the root unchanged.
        const double wsum = std::accumulate(weight.begin(), weight.end(), 0.0);
        objective = [&, wsum](const std::vector<double>& x) {
            double g_a = 0.0, g_b = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double wr = weight[i] * residual(x[0], x[1], i);
                g_a += (x[1] - s.u[i]) * wr;
                g_b += wr;
            }
            return (g_a * g_a + g_b * g_b) / (wsum * wsum);
        };
    } else {
        fit.least_squares = true;
        objective = [&](const std::vector<double>& x) {
            double sum = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double r = residual(x[0], x[1], i);
                sum += r * r;
            }
            return sum;
        };
    }

    const double rho = lag1_autocorrelation(s.u);
    std::vector<double> x0{-std::log(std::max(rho, 0.01)) / h, (mean - s.lo) / s.range};
    project(x0);
    const std::vector<double> steps{0.5 * x0[0], 0.1};
    fit.initial_objective = objective(x0);
    const NelderMeadResult r = nelder_mead(objective, project, x0, steps, options.optimizer);
    std::vector<double> x = r.x;
    double value = r.value;
    // Both branches are linear in theta = a (1 - h a / 2) and phi = theta b:
    // the residual is du - h phi + h theta u. Their exact root is a weighted
    // least-squares line; take it when it lies in the box and beats the
    // simplex, which can stall when a few samples carry extreme weights.
    if (const auto root = linear_drift_root(s.u, beta > 0.0 ? weight : std::vector<double>(n, 1.0), h)) {
        std::vector<double> y = *root;
        project(y);
        if (y == *root) {
            const double v = objective(y);
            if (v <= value) {
                x = y;
                value = v;
            }
        }
    }
    fit.a = x[0];
    fit.b = std::clamp(s.lo + x[1] * s.range, c, d);
    fit.objective = value;
    fit.iterations = r.iterations;
    fit.converged = r.converged;
    return fit;
}

FitReport identify_hour(const HourSamples& samples, const EstimationOptions& options) {
    const DiffusionFit diff = estimate_diffusion(samples, options);
    const DriftFit dr = estimate_drift(samples, diff.c, diff.d, diff.beta, options);
    FitReport report;
    report.params = SdeParams{dr.a, dr.b, diff.beta, diff.c, diff.d};
    report.diffusion_objective = diff.objective;
    report.drift_objective = dr.objective;
    report.iterations = diff.iterations + dr.iterations;
    report.converged = diff.converged && dr.converged;
    if (diff.non_volatile) report.flags |= kNonVolatile;
    if (dr.degenerate) report.flags |= kDriftDegenerate;
    if (dr.least_squares) report.flags |= kDriftLeastSquares;
    if (!report.converged) report.flags |= kNotConverged;
    report.params.validate();
    return report;
}

DayFit identify_day(const std::vector<double>& values, const std::vector<bool>& mask, std::size_t m,
                    double step_seconds, const EstimationOptions& options) {
    require(m >= 1, ErrorKind::Data, "identify_day: m must be >= 1");
    require(values.size() == mask.size(), ErrorKind::Dimension, "identify_day: mask length mismatch");
    const double per_hour_d = 3600.0 / step_seconds;
    require(std::abs(per_hour_d - std::round(per_hour_d)) < 1e-9, ErrorKind::Data, "step must divide 3600 s");
    const auto per_hour = static_cast<std::size_t>(std::llround(per_hour_d));
    require(values.size() == m * per_hour, ErrorKind::Dimension,
            "identify_day: expected " + std::to_string(m * per_hour) + " samples");

    std::vector<std::optional<FitReport>> fits(m);
    parallel_for(m, [&](std::size_t k) {
        const std::size_t begin = k * per_hour;
        std::size_t usable = 0;
        std::size_t best_start = 0, best_len = 0;
        for (std::size_t i = 0; i < per_hour;) {
            if (!mask[begin + i]) {
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j < per_hour && mask[begin + j]) ++j;
            usable += j - i;
            if (j - i > best_len) {
                best_len = j - i;
                best_start = i;
            }
            i = j;
        }
        if (2 * usable < per_hour || best_len < options.min_samples) return;
        HourSamples hour;
        hour.h_seconds = step_seconds;
        hour.values.assign(values.begin() + static_cast<std::ptrdiff_t>(begin + best_start),
                           values.begin() + static_cast<std::ptrdiff_t>(begin + best_start + best_len));
        fits[k] = identify_hour(hour, options);
    });

    require(std::any_of(fits.begin(), fits.end(), [](const auto& f) { return f.has_value(); }), ErrorKind::Data,
            "day rejected: no hour has enough usable samples");

    DayFit day;
    day.params.hours.resize(m);
    day.reports.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        if (fits[k]) {
            day.reports[k] = *fits[k];
            continue;
        }
        std::optional<SdeParams> prev, next;
        for (std::size_t j = k; j-- > 0;)
            if (fits[j]) {
                prev = fits[j]->params;
                break;
            }
        for (std::size_t j = k + 1; j < m; ++j)
            if (fits[j]) {
                next = fits[j]->params;
                break;
            }
        SdeParams p = prev ? *prev : *next;
        if (prev && next) {
            p.a = 0.5 * (prev->a + next->a);
            p.b = 0.5 * (prev->b + next->b);
            p.beta = 0.5 * (prev->beta + next->beta);
            p.c = 0.5 * (prev->c + next->c);
            p.d = 0.5 * (prev->d + next->d);
        }
        FitReport r;
        r.params = p;
        r.flags = kInterpolated;
        day.reports[k] = r;
    }
    for (std::size_t k = 0; k < m; ++k) day.params.hours[k] = day.reports[k].params;
    return day;
}

}  // namespace pvsde
