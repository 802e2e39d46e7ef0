#pragma once

#include <functional>

namespace sdllb {

/// Number of worker threads: hardware concurrency, capped by the
/// SDLLB_THREADS environment variable. Always >= 1.
int worker_count();

/// Runs chunk_fn(begin_i, end_i) over a partition of [begin, end).
/// Chunks are contiguous; results must not depend on chunk boundaries.
void parallel_for(int begin, int end,
                  const std::function<void(int, int)>& chunk_fn,
                  int min_grain = 1024);

}  // namespace sdllb
