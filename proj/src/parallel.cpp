// Copyright 2026 the qzeno developers
// SPDX-License-Identifier: Apache-2.0

#include "parallel.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qzeno {

int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for_index(long n, int n_threads, const std::function<void(long)>& fn) {
  parallel_for_index_workers(n, n_threads, [&fn](int, long i) { fn(i); });
}

void parallel_for_index_workers(long n, int n_threads,
                                const std::function<void(int, long)>& fn) {
  if (n <= 0) return;
  n_threads = resolve_thread_count(n_threads);
  if (n_threads == 1 || n == 1) {
    for (long i = 0; i < n; ++i) fn(0, i);
    return;
  }

  std::atomic<long> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&](int worker_id) {
    for (;;) {
      const long i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) return;
      try {
        fn(worker_id, i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const int workers = static_cast<int>(std::min<long>(n, n_threads));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker, w);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace qzeno
