#pragma once

#include <cstddef>
#include <functional>

namespace qevo {

/// Worker count from QEVO_WORKERS, else the hardware concurrency (min 1).
std::size_t worker_count();

/// Splits [0, n) into contiguous ranges and runs fn(lo, hi) on each, on up
/// to worker_count() threads. Runs inline for a single range. The first
/// exception thrown by any range is rethrown after all ranges finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

/// parallel_for with one index per task; for coarse work items.
void parallel_each(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace qevo
