#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace specrank {

/// Worker count used when a caller passes 0: the SPECRANK_THREADS environment
/// variable if set and positive, otherwise std::thread::hardware_concurrency().
unsigned default_thread_count();

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 = default).
/// Indices are handed out in contiguous blocks; each body writes only its own
/// slot, so results never depend on the worker count. The first exception
/// thrown by any body is rethrown on the calling thread.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace specrank
