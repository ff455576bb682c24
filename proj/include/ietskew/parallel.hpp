#pragma once

#include <cstddef>
#include <functional>

namespace ietskew {

// Worker count: IETSKEW_WORKERS if set and positive, else hardware concurrency.
unsigned worker_count();

// Runs fn(i) for i in [0, n) on worker_count() threads. Callers write results
// into per-index slots so output does not depend on scheduling. The first
// exception thrown by any task is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace ietskew
