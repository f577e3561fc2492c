#pragma once

#include <cstddef>
#include <functional>

namespace roadnet {

/// Thread count from ROADNET_THREADS, else hardware concurrency (at least 1).
std::size_t default_thread_count();

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Results must be
/// written to per-index slots by the caller; if several iterations throw, the
/// exception from the lowest index is rethrown.
void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace roadnet
