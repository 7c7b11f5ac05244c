#pragma once

#include <cstddef>
#include <functional>

namespace cardframe {

// Program-wide worker limit, like a core budget set once per run.
void set_thread_budget(int n);  // clamped to >= 1
int thread_budget();

size_t chunk_count(size_t n, size_t chunk_size);

// Splits [0, n) into contiguous chunks and runs fn(chunk_index, begin, end),
// possibly on several threads. Boundaries depend only on (n, chunk_size);
// callers merge per-chunk results in chunk order, which keeps every result
// independent of the thread count. chunk_size 0 derives a size from n and
// the thread budget.
void for_each_chunk(size_t n, size_t chunk_size,
                    const std::function<void(size_t, size_t, size_t)>& fn);

}  // namespace cardframe
