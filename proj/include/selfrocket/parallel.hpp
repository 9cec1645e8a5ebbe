#pragma once

#include <cstddef>
#include <functional>

namespace selfrocket {

// Process-wide worker budget (CLI --jobs / SELFROCKET_JOBS). 0 = hardware.
int global_jobs();
void set_global_jobs(int jobs);

// Run fn(i) for i in [0, n) on up to n_threads workers (0 = global budget).
// Static block partition, each index owns its own output slot, so results are
// identical for any thread count. If several calls throw, the exception from
// the lowest index is rethrown (again: thread-count independent).
void parallel_for(std::size_t n, int n_threads, const std::function<void(std::size_t)>& fn);

} // namespace selfrocket
