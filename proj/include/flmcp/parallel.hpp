#ifndef FLMCP_PARALLEL_HPP_
#define FLMCP_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace flmcp {

/// Worker count: FLMCP_WORKERS if set, otherwise hardware concurrency.
/// Only affects speed; every result is reduced by task index.
int worker_count();

/// Runs fn(i) for i in [0, count) on a worker pool. Each index runs exactly
/// once; callers store results by index, so the schedule cannot change the
/// output. The first exception thrown by a task is rethrown after join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace flmcp

#endif  // FLMCP_PARALLEL_HPP_
