#include "pvsde/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pvsde/error.hpp"

namespace pvsde {

namespace {

struct Vertex {
    std::vector<double> x;
    double f;
};

double distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                             const std::function<void(std::vector<double>&)>& project,
                             std::vector<double> start,
                             const std::vector<double>& steps,
                             const NelderMeadOptions& options) {
    const std::size_t n = start.size();
    require(n > 0 && steps.size() == n, ErrorKind::Dimension, "nelder_mead: bad dimensions");

    auto eval = [&](std::vector<double> x) {
        project(x);
        double f = objective(x);
        if (!std::isfinite(f)) f = HUGE_VAL;
        return Vertex{std::move(x), f};
    };

    std::vector<Vertex> simplex;
    simplex.reserve(n + 1);
    simplex.push_back(eval(start));
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> x = simplex[0].x;
        x[i] += steps[i];
        Vertex v = eval(x);
        if (distance(v.x, simplex[0].x) == 0.0) {
            // The step was projected away; try the opposite direction.
            x = simplex[0].x;
            x[i] -= steps[i];
            v = eval(x);
        }
        simplex.push_back(std::move(v));
    }

    auto by_value = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
    NelderMeadResult result;
    std::size_t it = 0;
    for (; it < options.max_iterations; ++it) {
        std::stable_sort(simplex.begin(), simplex.end(), by_value);
        double diameter = 0.0;
        for (std::size_t i = 1; i <= n; ++i)
            diameter = std::max(diameter, distance(simplex[i].x, simplex[0].x));
        if (diameter < options.diameter_tolerance) {
            result.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i].x[j] / static_cast<double>(n);

        auto along = [&](double t) {
            std::vector<double> x(n);
            for (std::size_t j = 0; j < n; ++j)
                x[j] = centroid[j] + t * (simplex[n].x[j] - centroid[j]);
            return eval(x);
        };

        Vertex reflected = along(-1.0);
        if (reflected.f < simplex[0].f) {
            Vertex expanded = along(-2.0);
            simplex[n] = expanded.f < reflected.f ? std::move(expanded) : std::move(reflected);
        } else if (reflected.f < simplex[n - 1].f) {
            simplex[n] = std::move(reflected);
        } else {
            const bool outside = reflected.f < simplex[n].f;
            Vertex contracted = along(outside ? -0.5 : 0.5);
            if (contracted.f < std::min(reflected.f, simplex[n].f)) {
                simplex[n] = std::move(contracted);
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    std::vector<double> x(n);
                    for (std::size_t j = 0; j < n; ++j)
                        x[j] = simplex[0].x[j] + 0.5 * (simplex[i].x[j] - simplex[0].x[j]);
                    simplex[i] = eval(x);
                }
            }
        }
    }
    std::stable_sort(simplex.begin(), simplex.end(), by_value);
    result.x = simplex[0].x;
    result.value = simplex[0].f;
    result.iterations = it;
    return result;
}

}  // namespace pvsde
