#pragma once

// Deterministic data parallelism: work is split into contiguous index ranges,
// each output slot is written by exactly one thread, and reductions run over
// a fixed pairwise tree independent of the thread count.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <span>
#include <thread>
#include <vector>

namespace ldg {

namespace detail {
inline int& thread_count_storage() {
  static int n = 1;
  return n;
}
}  // namespace detail

inline int thread_count() { return detail::thread_count_storage(); }
inline void set_thread_count(int n) { detail::thread_count_storage() = std::max(1, n); }

/// Calls fn(i) for i in [0, count). fn must only write to slots owned by i.
/// An exception thrown for any index is rethrown after all workers join; when
/// several chunks fail, the one with the lowest indices wins.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t chunk = (count + threads - 1) / threads;
  std::vector<std::exception_ptr> errors(threads);
  auto run = [&](std::size_t t) {
    const std::size_t lo = t * chunk, hi = std::min(count, lo + chunk);
    try {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    } catch (...) {
      errors[t] = std::current_exception();
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads - 1);
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(run, t);
    run(0);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Pairwise (tree) summation with a fixed shape determined by the length only.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

}  // namespace ldg
