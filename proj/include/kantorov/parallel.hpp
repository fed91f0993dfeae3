#pragma once

// Static partitioning of index ranges over worker threads. Each index is
// handled by exactly one worker, so results written by index do not depend
// on scheduling.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace kantorov {

namespace detail {
inline std::atomic<int>& worker_setting() {
  static std::atomic<int> workers{1};
  return workers;
}
}  // namespace detail

/// Number of workers used by grid and table fills (default 1).
inline int worker_count() { return detail::worker_setting().load(); }

/// 0 selects the hardware concurrency.
inline void set_worker_count(int n) {
  if (n <= 0) n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  detail::worker_setting().store(n);
}

/// Calls fn(i) for i in [0, count). The exception of the lowest failing
/// chunk is rethrown.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(worker_count()), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      const std::size_t lo = count * w / workers, hi = count * (w + 1) / workers;
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace kantorov
