#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace esm {

namespace detail {
inline std::atomic<int>& thread_count_ref() {
  static std::atomic<int> count{1};
  return count;
}
}  // namespace detail

/// Set the number of worker threads used by parallel loops (>= 1).
inline void set_thread_count(int n) { detail::thread_count_ref().store(n < 1 ? 1 : n); }

inline int thread_count() { return detail::thread_count_ref().load(); }

/// Deterministic parallel loop: the index range is split into contiguous
/// blocks, one per worker, so each index is always processed by the same
/// arithmetic regardless of the worker count.  Results must be written to
/// disjoint slots; with that discipline the output is bitwise independent
/// of the thread count.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const int requested = thread_count();
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(requested), n == 0 ? 1 : n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t block = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * block;
    const std::size_t hi = std::min(n, lo + block);
    pool.emplace_back([lo, hi, &fn, &errors, w]() {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace esm
