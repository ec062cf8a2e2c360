#pragma once

#include <cstddef>
#include <functional>

namespace streetforge {

// Worker cap: min(hardware_concurrency, STREETFORGE_THREADS if set).
int worker_count();

// Runs fn(begin, end) over disjoint contiguous chunks of [0, n), one chunk
// per worker. Chunk boundaries depend only on n and the worker count, never
// on scheduling, so any per-chunk output is deterministic.
void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t)>& fn);

// Element-wise convenience wrapper over parallel_chunks.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace streetforge
