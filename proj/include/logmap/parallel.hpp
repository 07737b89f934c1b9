#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace logmap {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs body(begin, end) over a partition of [0, count) into one contiguous
// slice per worker. Slices are disjoint, so bodies may fill distinct indices
// of a shared preallocated buffer without locks, and the result is identical
// for every thread count.
inline void parallel_for(
    std::size_t count, int threads,
    const std::function<void(std::size_t, std::size_t)>& body) {
  if (count == 0) return;
  std::size_t workers =
      threads < 1 ? 1 : static_cast<std::size_t>(threads);
  if (workers > count) workers = count;
  if (workers == 1) {
    body(0, count);
    return;
  }
  const std::size_t chunk = count / workers;
  const std::size_t rem = count % workers;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::size_t begin = 0;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t end = begin + chunk + (w < rem ? 1 : 0);
    pool.emplace_back([&, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
    begin = end;
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace logmap
