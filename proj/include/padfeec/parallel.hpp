#pragma once

#include <functional>

namespace padfeec {

// Worker count: PADFEEC_THREADS if set and positive, else hardware parallelism.
int worker_count();

// Calls f(i) for 0 <= i < n, split into contiguous chunks over worker threads.
// The first exception thrown by any worker is rethrown on the caller.
void parallel_for(int n, const std::function<void(int)>& f);

}  // namespace padfeec
