#pragma once

// Minimal deterministic work sharing. Results must not depend on the worker
// count, so parallel loops only ever write to disjoint output slots and
// reductions combine fixed-size chunks in index order.

#include <cstddef>
#include <functional>

namespace sdfm {

// Worker count: SDFM_THREADS if set (clamped to >= 1), else hardware
// concurrency, else 1.
int worker_count();

// Runs fn(i) for i in [0, n) across workers; fn must only touch data owned by
// index i. Exceptions inside fn propagate (first one wins).
void parallel_for(long n, const std::function<void(long)>& fn);

} // namespace sdfm
