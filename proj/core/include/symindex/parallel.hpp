#pragma once

#include <cstddef>
#include <functional>

namespace symindex {

// Process-wide worker count used by Monte Carlo loops and grid sweeps.
// Results are bit-identical for any setting: work items own their RNG substream
// and reductions run in index order over preallocated slots.
void set_max_threads(unsigned n);
unsigned max_threads();

// Runs fn(i) for i in [0, n). Chunked across threads; exceptions are rethrown
// on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace symindex
