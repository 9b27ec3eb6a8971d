#pragma once

#include <cstdint>
#include <functional>

namespace beeid {

/// Worker cap for parallel loops; 0 restores the hardware default.
void set_max_threads(int n);
int max_threads();

/// Runs fn(i) for i in [0, count). Work is split into contiguous chunks; the
/// callee must be safe to run concurrently. Results must not depend on the
/// partition (pure per-index work, order-independent aggregation).
void parallel_for(int64_t count, const std::function<void(int64_t)>& fn);

}  // namespace beeid
