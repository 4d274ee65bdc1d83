#pragma once

#include <cstddef>
#include <functional>

namespace superfractal {

/// Worker count: hardware concurrency, capped by SUPERFRACTAL_THREADS when set.
std::size_t worker_count();

/// Runs task(i) for i in [0, n) on up to worker_count() threads. Tasks must
/// write to disjoint state; the caller reduces results in index order so
/// the outcome never depends on the number of workers.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task);

}  // namespace superfractal
