#pragma once

#include <functional>

namespace viscrf {

/// Number of worker threads for internal loops. Reads VISCRF_THREADS
/// (0 or unset = hardware concurrency).
int worker_count();

/// Runs body(i) for i in [begin, end) split into contiguous chunks across
/// worker threads. Each index is visited exactly once; bodies must only
/// write to disjoint outputs.
void parallel_for(int begin, int end, const std::function<void(int)>& body);

}  // namespace viscrf
