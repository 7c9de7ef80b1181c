#pragma once

#include <cstddef>
#include <functional>

namespace cnm {

// Worker count from the CNM_THREADS environment variable (default 1).
std::size_t thread_count();

// Calls fn(i) for i in [0, count), splitting the range into contiguous
// chunks across thread_count() workers. fn must only write to slots owned by
// its index, which keeps results independent of the schedule.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace cnm
