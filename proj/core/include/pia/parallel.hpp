#pragma once

#include <cstddef>
#include <functional>

namespace pia {

/// Worker count from PIA_THREADS, falling back to hardware concurrency.
int default_thread_count();

/// Runs fn(i) for every i in [0, n), split into contiguous blocks across up
/// to `threads` workers. Results must depend only on the index, never on
/// execution order; with that contract, output is identical for any thread
/// count. The first exception thrown by a worker is rethrown on the caller.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace pia
