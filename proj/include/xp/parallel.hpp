#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace xp {

namespace detail {
inline std::atomic<unsigned>& thread_cap() {
  static std::atomic<unsigned> cap{0};
  return cap;
}
}  // namespace detail

/// Caps worker threads used by grid loops; 0 restores the default
/// (hardware concurrency).
inline void set_max_threads(unsigned n) { detail::thread_cap().store(n); }

inline unsigned max_threads() {
  unsigned cap = detail::thread_cap().load();
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  return cap == 0 ? hw : std::min(cap, hw);
}

/// Runs body(i) for i in [0, count). Work is split into contiguous blocks;
/// callers write results into per-index slots and reduce serially, so results
/// never depend on the thread count.
template <class Body>
void parallel_for(std::size_t count, Body&& body, std::size_t min_block = 64) {
  unsigned workers = max_threads();
  if (count < 2 * min_block || workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, (count + min_block - 1) / min_block));
  std::atomic<std::size_t> next{0};
  const std::size_t block = std::max<std::size_t>(min_block, count / (8 * workers) + 1);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    try {
      for (;;) {
        std::size_t begin = next.fetch_add(block);
        if (begin >= count) return;
        std::size_t end = std::min(count, begin + block);
        for (std::size_t i = begin; i < end; ++i) body(i);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(count);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned t = 1; t < workers; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace xp
