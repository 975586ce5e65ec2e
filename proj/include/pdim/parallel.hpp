#pragma once

#include <cstddef>
#include <functional>

namespace pdim {

/// Worker count: PDIM_THREADS if set and positive, otherwise hardware concurrency.
int worker_count();

/// Runs fn(i) for i in [0, n) on up to worker_count() threads. Each index is
/// handled exactly once, so results written per index are deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace pdim
