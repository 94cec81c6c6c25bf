#pragma once

#include <functional>

namespace vqad {

// Worker count for tile-parallel stages. Reads VQAD_THREADS once; falls back
// to the hardware concurrency when unset or unparsable.
int worker_count();

// Runs fn(i) for i in [0, n). Work is split into contiguous blocks, one per
// worker; fn must not touch shared mutable state unless the slots are
// per-index. Exceptions propagate to the caller.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace vqad
