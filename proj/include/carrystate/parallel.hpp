#pragma once

#include <cstddef>
#include <functional>

namespace cs {

/// Worker count used when a call passes threads <= 0. Defaults to 1.
void set_default_threads(int threads);
int default_threads();

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index runs
/// exactly once; callers write results into per-index slots so the outcome
/// does not depend on scheduling. The exception from the lowest failing
/// index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, int threads = 0);

}  // namespace cs
