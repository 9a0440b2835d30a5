#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace grslab {

/// Worker cap: GRSLAB_THREADS if set, hardware concurrency otherwise.
inline int max_threads() {
  if (const char* env = std::getenv("GRSLAB_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

/// Runs fn(first, last) over disjoint chunks of [0, n).  Results must be
/// written to disjoint slots; chunking is deterministic, so output does not
/// depend on the number of workers.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  int workers = std::min<std::size_t>(max_threads(), n);
  if (workers <= 1) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::size_t chunk = (n + workers - 1) / workers;
  for (int t = 0; t < workers; ++t) {
    std::size_t lo = t * chunk;
    std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace grslab
