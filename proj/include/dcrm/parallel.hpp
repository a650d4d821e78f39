#pragma once

#include <cstddef>
#include <functional>

namespace dcrm {

/// Worker count: DCRM_THREADS if set and positive, else the hardware count.
std::size_t thread_count();

/// Runs body(i) for i in [0, n) on up to thread_count() threads. Each index
/// is handled exactly once; callers write results by index, so the outcome
/// does not depend on scheduling. The first exception is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace dcrm
