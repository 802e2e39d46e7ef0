#include "sdllb/threads.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace sdllb {

int worker_count() {
  static const int n = [] {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (const char* env = std::getenv("SDLLB_THREADS")) {
      int cap = std::atoi(env);
      if (cap >= 1) hw = std::min(hw, cap);
    }
    return hw;
  }();
  return n;
}

void parallel_for(int begin, int end,
                  const std::function<void(int, int)>& chunk_fn,
                  int min_grain) {
  const int n = end - begin;
  if (n <= 0) return;
  int workers = std::min(worker_count(), (n + min_grain - 1) / min_grain);
  if (workers <= 1) {
    chunk_fn(begin, end);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const int chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const int lo = begin + w * chunk;
    const int hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(chunk_fn, lo, hi);
  }
  for (auto& t : pool) t.join();
}

}  // namespace sdllb
