#pragma once

#include <cstddef>
#include <functional>

namespace stabkit {

/// Worker count from STABKIT_THREADS, else hardware concurrency (at least 1).
unsigned default_threads();

/// Runs body(i) for i in [0, count) on up to `threads` workers. Each index
/// runs exactly once; callers write results to slot i so output does not
/// depend on scheduling. After a body throws, no new indices start; the
/// exception from the lowest failing index is rethrown once workers stop.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace stabkit
