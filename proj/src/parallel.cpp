#include "qproc/parallel.hpp"

#include <atomic>

namespace qproc {

namespace {

std::atomic<int> g_threads{0};  // 0 = auto

}  // namespace

int parallel_threads() {
  const int configured = g_threads.load();
  if (configured > 0) return configured;
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp(hw, 1u, 16u));
}

void set_parallel_threads(int count) { g_threads.store(count); }

}  // namespace qproc
