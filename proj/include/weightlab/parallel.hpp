#pragma once

#include <cstddef>
#include <functional>

namespace weightlab {

/// Worker count: WEIGHTLAB_THREADS if set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
int thread_count();

/// Runs body(i) for i in [0, n). Each index writes its own output slot, so
/// results do not depend on scheduling. If several bodies throw, the
/// exception of the smallest index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace weightlab
