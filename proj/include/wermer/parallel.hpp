#pragma once

// Fixed-slot parallel loop. Each index writes only its own result slot, so
// output does not depend on the worker count or on scheduling.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace wermer {

/// Calls f(i) for i in [0, count) on up to `workers` threads. The exception
/// thrown for the smallest index is rethrown.
template <class F>
void parallel_for(std::size_t count, int workers, F&& f) {
  const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, workers)), count);
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t err_index = count;
  std::exception_ptr err;
  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        f(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < err_index) {
          err_index = i;
          err = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < nthreads; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

/// Results of f(i) collected in index order.
template <class R, class F>
std::vector<R> parallel_map(std::size_t count, int workers, F&& f) {
  std::vector<R> out(count);
  parallel_for(count, workers, [&](std::size_t i) { out[i] = f(i); });
  return out;
}

}  // namespace wermer
