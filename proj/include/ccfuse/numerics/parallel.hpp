#pragma once

#include <cstddef>
#include <functional>

namespace ccfuse::numerics {

// Default worker count: CCFUSE_THREADS when set, else hardware concurrency.
int default_thread_count();

// Runs body(i) for i in [0, n) on up to `threads` workers (0 = default).
// Work items are independent; the first exception thrown is rethrown after
// all workers stop.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace ccfuse::numerics
