#pragma once

#include <cstddef>
#include <functional>

namespace tiltci {

/// Worker cap used when callers pass threads = 0. Defaults to hardware concurrency.
void set_default_threads(unsigned n);
unsigned default_threads();

/// Runs fn(i) for i in [0, n) on up to `threads` workers. The first exception
/// thrown by any call is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, unsigned threads = 0);

}  // namespace tiltci
