#include "qevo/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace qevo {

std::size_t worker_count() {
  if (const char* env = std::getenv("QEVO_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

// Set on pool threads so nested parallel calls run inline.
thread_local bool t_in_pool = false;

void run_tasks(std::size_t tasks, const std::function<void(std::size_t)>& task) {
  const std::size_t workers = t_in_pool ? 1 : std::min(worker_count(), tasks);
  if (workers <= 1) {
    for (std::size_t t = 0; t < tasks; ++t) task(t);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto loop = [&] {
    const bool outer = t_in_pool;
    t_in_pool = true;
    for (std::size_t t = next++; t < tasks; t = next++) {
      try {
        task(t);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
    t_in_pool = outer;
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(loop);
  loop();
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t ranges = std::min(n, worker_count() * 4);
  const std::size_t step = (n + ranges - 1) / ranges;
  run_tasks((n + step - 1) / step, [&](std::size_t r) { fn(r * step, std::min(n, (r + 1) * step)); });
}

void parallel_each(std::size_t n, const std::function<void(std::size_t)>& fn) { run_tasks(n, fn); }

}  // namespace qevo
