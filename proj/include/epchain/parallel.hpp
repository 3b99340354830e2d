#pragma once

#include <cstddef>
#include <functional>

namespace epchain {

/// requested if nonzero, else EPCHAIN_THREADS if set to a positive integer,
/// else the hardware concurrency (at least 1).
unsigned resolve_threads(unsigned requested = 0);

/// Calls body(i) for i in [0, count) on up to `threads` workers. If any call
/// throws, the exception from the smallest index is rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

} // namespace epchain
