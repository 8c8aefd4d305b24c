#pragma once

#include <cstddef>
#include <functional>

namespace sbcim {

// Worker count for fan-out loops. The SBCIM_WORKERS environment variable
// overrides hardware concurrency; it is re-read on every call so a process
// can compare runs at different worker counts.
unsigned worker_count();

// Runs body(0..count-1) across workers. Each index must write only its own
// output slot; completion order is unspecified, so callers aggregate in a
// fixed order afterwards.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace sbcim
