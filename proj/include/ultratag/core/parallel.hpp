#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace ultratag {

/// Runs fn(i) for i in [0, n) on at most `workers` threads. Results must be
/// written by index, so completion order never matters. If any call throws,
/// the exception from the lowest failing index is rethrown after all
/// workers have joined.
template <typename Fn>
void parallel_for_indexed(std::size_t n, std::size_t workers, Fn&& fn) {
  if (n == 0) return;
  workers = std::clamp<std::size_t>(workers, 1, n);
  std::vector<std::exception_ptr> errors(n);
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < n && !failed.load(); i = next.fetch_add(1)) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
            failed.store(true);
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace ultratag
