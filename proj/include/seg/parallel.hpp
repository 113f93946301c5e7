#pragma once

#include <cstddef>
#include <functional>

namespace seg {

/// Resolves a requested worker count; 0 means hardware concurrency.
std::size_t resolve_threads(std::size_t requested);

/// Calls fn(i) for i in [0, n) on up to `threads` workers. Results must be
/// written to per-index slots; the first exception thrown by any call is
/// rethrown after all workers finish.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace seg
