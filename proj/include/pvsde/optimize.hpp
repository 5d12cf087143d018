#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace pvsde {

struct NelderMeadOptions {
    double diameter_tolerance = 1e-8;
    std::size_t max_iterations = 500;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Derivative-free minimization of `objective`.
///
/// `project` maps any trial point into the feasible box; it is applied to
/// every vertex before evaluation so the returned point is always feasible.
/// `steps` sets the initial simplex edge along each coordinate. Convergence
/// is declared when the largest vertex distance from the best vertex falls
/// below the tolerance.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                             const std::function<void(std::vector<double>&)>& project,
                             std::vector<double> start,
                             const std::vector<double>& steps,
                             const NelderMeadOptions& options = {});

}  // namespace pvsde
