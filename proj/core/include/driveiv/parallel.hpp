#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace driveiv {

// Runs fn(i) for i in [0, count) across up to n_threads workers. Callers
// must write results into per-index slots; combined with per-index derived
// RNG seeds this keeps parallel runs byte-identical to sequential ones.
inline void parallel_for(std::size_t count,
                         const std::function<void(std::size_t)>& fn,
                         unsigned n_threads = 0) {
  if (n_threads == 0) n_threads = std::thread::hardware_concurrency();
  if (n_threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t workers_wanted =
      std::min<std::size_t>(n_threads, count);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  workers.reserve(workers_wanted);
  std::exception_ptr error;
  std::mutex error_mutex;
  for (std::size_t t = 0; t < workers_wanted; ++t) {
    workers.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace driveiv
