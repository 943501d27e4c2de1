#pragma once

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace horokit {

/// Worker cap: HOROKIT_THREADS when set, hardware concurrency otherwise.
inline unsigned max_threads() {
  if (const char* env = std::getenv("HOROKIT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Deterministic parallel map: f(i) writes only to its own slot, chunks are
/// contiguous, and any reduction happens sequentially afterwards, so results
/// do not depend on the thread count.
template <class F>
void parallel_for(long n, F&& f) {
  const unsigned workers = std::min<unsigned>(max_threads(), static_cast<unsigned>(std::max<long>(n, 1)));
  if (workers <= 1 || n < 4) {
    for (long i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const long chunk = (n + static_cast<long>(workers) - 1) / static_cast<long>(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const long lo = static_cast<long>(w) * chunk;
    const long hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &f] {
      for (long i = lo; i < hi; ++i) f(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace horokit
