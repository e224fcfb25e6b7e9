#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace compgrad {

// Worker count: COMPGRAD_THREADS caps (or pins) parallelism; 0/unset means
// hardware concurrency. Results must not depend on the thread count, so
// callers hand out deterministic per-item seeds and write to disjoint slots.
inline int resolve_thread_count(int requested = 0) {
  int n = requested;
  if (const char* env = std::getenv("COMPGRAD_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = (n > 0) ? std::min(n, cap) : cap;
  }
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  return std::max(1, n);
}

// Runs fn(i) for i in [0, count) on up to `threads` workers. Rethrows the
// first exception raised by any worker.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                         int threads = 0) {
  const int workers = std::min<std::size_t>(resolve_thread_count(threads), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      while (!failed.load(std::memory_order_relaxed)) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) break;
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
          break;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace compgrad
