#pragma once

#include <cstddef>
#include <functional>

namespace icegsa {

/// Process-wide worker count used by parallel_for. 0 selects hardware concurrency.
void set_worker_count(std::size_t workers);
std::size_t worker_count();

/// Runs task(t) for t in [0, n_tasks). Tasks must write only to their own output slots, so
/// results never depend on the number of workers. If tasks throw, the exception from the
/// lowest task index is rethrown after all workers finish.
void parallel_for(std::size_t n_tasks, const std::function<void(std::size_t)>& task);

}  // namespace icegsa
