#pragma once

#include <cstddef>
#include <functional>

namespace isolab {

/// Worker count: hardware concurrency, capped by the ISOLAB_THREADS
/// environment variable when it is set to a positive integer.
int worker_count();

/// Runs body(i) for i in [0, count) on up to worker_count() threads.
/// Results must be written to per-index slots; any reduction happens after
/// the call in index order, so outputs do not depend on scheduling.
/// The first exception thrown by a body is rethrown on the caller.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace isolab
