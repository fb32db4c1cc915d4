#pragma once

#include <cstddef>
#include <functional>

namespace palim {

/// Worker count: `PALIM_THREADS` when set to a positive integer, else
/// `requested` when positive, else the number of logical cores.
int resolve_threads(int requested);

/// Runs body(0) .. body(n - 1) on up to `threads` workers. If any call throws,
/// the exception with the lowest index is rethrown once all workers stop.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace palim
