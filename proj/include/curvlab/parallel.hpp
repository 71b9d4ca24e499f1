#pragma once

#include <cstddef>
#include <functional>

namespace curvlab {

// worker count: min(hardware, CURVLAB_THREADS if set); always >= 1
int worker_count();

// runs fn(i) for i in [0, n); results must be written to per-index slots so the
// outcome is independent of scheduling. Falls back to a serial loop for tiny n.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace curvlab
