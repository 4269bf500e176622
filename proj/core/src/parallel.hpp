#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace hydrodyn::detail {

/// Worker cap: HYDRODYN_THREADS if set, else hardware concurrency.
inline unsigned max_threads() {
  if (const char* env = std::getenv("HYDRODYN_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

/// Run fn(i) for i in [0, n). Each index is processed exactly once; results
/// must go to disjoint slots so the outcome is independent of scheduling.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const unsigned workers = std::min<std::size_t>(max_threads(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace hydrodyn::detail
