#pragma once

#include <cstddef>
#include <functional>

namespace bergman {

/// Worker count: BERGMAN_LAB_THREADS if set to a positive integer, else the hardware concurrency.
int worker_count();

/// Runs fn(i) for i in [0, n). Callers write results into slot i, so the outcome does not
/// depend on the schedule.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace bergman
