#pragma once

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace mmmi {

// Worker count: MMMI_THREADS if set, else hardware concurrency.
inline int default_thread_count() {
  if (const char* env = std::getenv("MMMI_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs body(begin, end) over a static block partition of [0, n).
// Workers must write only to disjoint, index-derived slots so the
// result is independent of thread count and scheduling.
inline void parallel_for(std::int64_t n,
                         const std::function<void(std::int64_t, std::int64_t)>& body,
                         int threads = 0) {
  if (n <= 0) return;
  if (threads <= 0) threads = default_thread_count();
  if (threads > n) threads = static_cast<int>(n);
  if (threads == 1) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  const std::int64_t chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const std::int64_t begin = t * chunk;
    const std::int64_t end = begin + chunk < n ? begin + chunk : n;
    if (begin >= end) break;
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace mmmi
