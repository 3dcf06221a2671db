#include "icegsa/parallel.hpp"

#include <atomic>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

namespace icegsa {

namespace {
std::atomic<std::size_t> g_workers{0};
thread_local bool t_inside_worker = false;

struct WorkerScope {
  WorkerScope() { t_inside_worker = true; }
  ~WorkerScope() { t_inside_worker = false; }
};
}

void set_worker_count(std::size_t workers) { g_workers.store(workers); }

std::size_t worker_count() {
  const std::size_t w = g_workers.load();
  if (w != 0) return w;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t n_tasks, const std::function<void(std::size_t)>& task) {
  if (n_tasks == 0) return;
  // Nested calls run inline on the worker that issued them.
  const std::size_t workers = t_inside_worker ? 1 : std::min(worker_count(), n_tasks);
  if (workers <= 1) {
    for (std::size_t t = 0; t < n_tasks; ++t) task(t);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::size_t error_index = std::numeric_limits<std::size_t>::max();
  std::exception_ptr error;

  auto worker = [&] {
    const WorkerScope scope;
    while (true) {
      const std::size_t t = next.fetch_add(1);
      if (t >= n_tasks) return;
      try {
        task(t);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (t < error_index) {
          error_index = t;
          error = std::current_exception();
        }
      }
    }
  };

  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace icegsa
