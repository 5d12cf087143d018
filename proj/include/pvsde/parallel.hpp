#pragma once

#include <cstddef>
#include <functional>

namespace pvsde {

/// Worker count: hardware concurrency, capped by the PVSDE_THREADS
/// environment variable when it is set to a positive integer.
std::size_t thread_count();

/// Runs body(i) for i in [0, n). Each index is handled exactly once; callers
/// write results into preallocated slots so output never depends on
/// scheduling. Calls nested inside a body run serially. The first
/// exception thrown by any body is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace pvsde
