#pragma once

#include <cstddef>
#include <functional>

namespace backtrace {

/// Worker cap: BACKTRACE_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
std::size_t worker_count();

/// Calls fn(i) for i in [0, n), split into contiguous chunks over at most
/// worker_count() threads. fn must only write to slots owned by index i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace backtrace
