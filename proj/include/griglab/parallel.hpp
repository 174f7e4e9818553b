#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

namespace griglab {

/// Runs fn(begin, end) over contiguous chunks of [0, n) on up to `threads`
/// workers. The first exception thrown by any worker is rethrown.
template <typename Fn>
void parallel_chunks(std::size_t n, unsigned threads, Fn&& fn) {
  if (n == 0) return;
  threads = std::max(1u, threads);
  if (threads == 1 || n < 2) {
    fn(std::size_t{0}, n);
    return;
  }
  std::size_t workers = std::min<std::size_t>(threads, n);
  std::size_t chunk = (n + workers - 1) / workers;
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t begin = w * chunk;
    std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  parallel_chunks(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) fn(i);
  });
}

inline constexpr std::size_t kNoHit = std::numeric_limits<std::size_t>::max();

/// Smallest index i in [0, n) with pred(i) true, or kNoHit. Workers stop
/// early once a smaller hit is known, so the result is the same for any
/// thread count.
template <typename Pred>
std::size_t parallel_first(std::size_t n, unsigned threads, Pred&& pred) {
  std::atomic<std::size_t> best{kNoHit};
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i)
      if (pred(i)) return i;
    return kNoHit;
  }
  // Interleaved blocks keep every worker near the front of the range.
  constexpr std::size_t kBlock = 256;
  std::size_t blocks = (n + kBlock - 1) / kBlock;
  std::atomic<std::size_t> next{0};
  parallel_chunks(threads, threads, [&](std::size_t, std::size_t) {
    for (;;) {
      std::size_t b = next.fetch_add(1);
      if (b >= blocks) return;
      std::size_t begin = b * kBlock;
      if (begin >= best.load(std::memory_order_relaxed)) return;
      std::size_t end = std::min(n, begin + kBlock);
      for (std::size_t i = begin; i < end; ++i) {
        if (i >= best.load(std::memory_order_relaxed)) break;
        if (pred(i)) {
          std::size_t cur = best.load();
          while (i < cur && !best.compare_exchange_weak(cur, i)) {
          }
          break;
        }
      }
    }
  });
  return best.load();
}

}  // namespace griglab
