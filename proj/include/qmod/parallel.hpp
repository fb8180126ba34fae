#pragma once

#include <mpfr.h>

#include <atomic>
#include <thread>
#include <vector>

namespace qmod {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  return int(hw > 16 ? 16 : hw);
}

// Runs f(i) for i in [lo, hi) on up to `threads` workers.  Each index is
// processed exactly once; callers write results into per-index slots so
// the outcome does not depend on scheduling.
template <class F>
void parallel_for(long lo, long hi, int threads, F&& f) {
  threads = resolve_threads(threads);
  long count = hi - lo;
  if (count <= 0) return;
  if (threads == 1 || count == 1) {
    for (long i = lo; i < hi; i++) f(i);
    return;
  }
  std::atomic<long> next{lo};
  auto worker = [&]() {
    for (;;) {
      long i = next.fetch_add(1);
      if (i >= hi) return;
      f(i);
    }
  };
  std::vector<std::thread> pool;
  int nw = int(std::min<long>(threads, count));
  pool.reserve(size_t(nw - 1));
  for (int w = 1; w < nw; w++)
    pool.emplace_back([&]() {
      worker();
      // short-lived workers must release mpfr's thread-local caches
      mpfr_free_cache2(MPFR_FREE_LOCAL_CACHE);
    });
  worker();
  for (auto& t : pool) t.join();
}

}  // namespace qmod
