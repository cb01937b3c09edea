#ifndef FFORGE_PARALLEL_HPP
#define FFORGE_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace fforge {

// Worker count: FOLIATION_FORGE_THREADS if set (0 = auto), else hardware concurrency.
int thread_count();

// Runs fn over contiguous chunks of [0, n).  Chunk boundaries depend only on n
// and the worker count, so per-chunk reductions can be merged deterministically.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace fforge

#endif  // FFORGE_PARALLEL_HPP
