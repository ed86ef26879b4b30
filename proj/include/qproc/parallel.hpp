#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace qproc {

// Process-wide worker count for embarrassingly parallel loops. Work items
// write to preallocated slots keyed by index, so results do not depend on
// the thread count.
int parallel_threads();
void set_parallel_threads(int count);

template <typename Fn>
void parallel_for(int count, Fn&& fn) {
  const int workers = std::min(parallel_threads(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&fn, w, workers, count] {
      for (int i = w; i < count; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace qproc
