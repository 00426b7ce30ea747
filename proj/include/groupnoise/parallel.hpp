#pragma once

#include <cstddef>
#include <functional>

namespace groupnoise {

/// Worker count: GROUPNOISE_THREADS when set (>= 1), else the hardware
/// concurrency.
int thread_count();

/// Split [0, count) into contiguous chunks, one per worker, and call
/// `body(begin, end)` on each. Chunk boundaries depend on the thread count,
/// so callers must make each index's result independent of its chunk.
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace groupnoise
