/**
 *  @file   parallel.hpp
 *  @brief  Row-parallel sweeps with thread-count independent results
 */
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace wigflow {

/// WIGFLOW_THREADS caps parallelism; unset or 0 means hardware concurrency.
inline unsigned thread_count() {
  unsigned n = 0;
  if (const char* env = std::getenv("WIGFLOW_THREADS")) {
    try {
      n = static_cast<unsigned>(std::stoul(env));
    } catch (...) {
      n = 0;
    }
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

/// Calls body(row) for row in [0, rows). Each row is handled by exactly one
/// thread, so anything written per row is independent of the thread count.
template <class Body>
void parallel_rows(std::size_t rows, Body&& body) {
  const std::size_t threads = std::min<std::size_t>(thread_count(), rows);
  if (threads <= 1) {
    for (std::size_t r = 0; r < rows; ++r) body(r);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t r = t; r < rows; r += threads) body(r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

/// Deterministic sum: per-row partials reduced sequentially in row order.
template <class RowSum>
double parallel_row_sum(std::size_t rows, RowSum&& row_sum) {
  std::vector<double> partial(rows, 0.0);
  parallel_rows(rows, [&](std::size_t r) { partial[r] = row_sum(r); });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace wigflow
