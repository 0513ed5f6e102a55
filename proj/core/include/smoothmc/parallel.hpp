#pragma once

#include <cstddef>
#include <functional>

namespace smoothmc {

/// Worker count: SMOOTHMC_THREADS if set (must be a positive integer),
/// otherwise hardware_concurrency (at least 1).
int default_thread_count();

/// Runs body(0), ..., body(count-1) on up to `threads` workers. Results must
/// be written to preallocated per-index slots; the schedule is work-stealing
/// by atomic counter, so only index-addressed writes keep output independent
/// of the thread count. If bodies throw, the exception for the smallest index
/// is rethrown after all workers stop.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace smoothmc
