#pragma once

#include <cstddef>
#include <functional>

namespace sparseanom {

std::size_t resolve_threads(std::size_t requested);

// Runs body(i) for i in [0, n) on up to `threads` workers (0 = hardware
// concurrency). Work is split into contiguous chunks; body must only write
// to slot i so the result is independent of scheduling. The first exception
// thrown by any worker is rethrown.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace sparseanom
