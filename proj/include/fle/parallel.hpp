#pragma once

#include <cstddef>
#include <functional>

namespace fle {

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 means
/// hardware concurrency).  Work is split into contiguous blocks, so results
/// written by index are independent of the thread count.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

/// Process-wide default used when callers pass threads = 0.
void set_default_threads(unsigned threads);
unsigned default_threads();

} // namespace fle
