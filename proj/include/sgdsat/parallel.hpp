#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sgdsat {

/// Thread count from an explicit request, else SGDSAT_THREADS, else the
/// hardware concurrency (at least 1).
int resolve_threads(int requested);

/// Runs fn(t) for t = 0..count-1 on up to `threads` workers. Results land in
/// slot t, so any reduction over the returned vector is order-independent of
/// the scheduling. The first exception (lowest index) is rethrown.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t count, int threads, Fn&& fn) {
  std::vector<T> out(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t t = next.fetch_add(1);
      if (t >= count) return;
      try {
        out[t] = fn(t);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  const int workers = static_cast<int>(std::min<std::size_t>(count, static_cast<std::size_t>(threads < 1 ? 1 : threads)));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace sgdsat
