#ifndef MAXLIN_PARALLEL_H_
#define MAXLIN_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace maxlin {

// Runs task(0..count-1) on up to `threads` workers (0 = hardware
// concurrency). Tasks must write only to their own output slots; callers
// reduce in index order, so results do not depend on scheduling. The first
// exception thrown by a task is rethrown after all workers join.
void ParallelFor(std::size_t count, const std::function<void(std::size_t)>& task,
                 std::size_t threads = 0);

std::size_t DefaultThreadCount();

}  // namespace maxlin

#endif  // MAXLIN_PARALLEL_H_
