#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace shellflux {

// Neumaier-compensated accumulator in extended precision. Adding values in
// a fixed order makes reductions reproducible bit for bit.
struct Accum {
  long double sum = 0.0L;
  long double comp = 0.0L;

  void add(long double x) {
    const long double t = sum + x;
    if (fabsl(sum) >= fabsl(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  long double value() const { return sum + comp; }
};

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(chunk_index) for chunk_index in [0, n_chunks) on a worker pool.
// Each chunk writes only its own slot, so results combine deterministically
// in chunk order regardless of the thread count.
template <typename Fn>
void run_chunks(std::int64_t n_chunks, int threads, Fn&& fn) {
  threads = resolve_threads(threads);
  if (threads <= 1 || n_chunks <= 1) {
    for (std::int64_t c = 0; c < n_chunks; ++c) fn(c);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::int64_t c = next.fetch_add(1);
        if (c >= n_chunks || failed.load()) return;
        try {
          fn(c);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failed.load()) std::rethrow_exception(error);
}

}  // namespace shellflux
