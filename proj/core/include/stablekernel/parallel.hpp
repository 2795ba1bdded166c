#pragma once

#include <cstddef>
#include <functional>

namespace stablekernel {

/// Worker count used by parallel_for; 1 runs everything on the calling thread.
void set_thread_count(int n);
int thread_count();

/// Run body(i) for i in [0, n). Each index must write only its own output slot, so results
/// do not depend on the thread count. The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace stablekernel
