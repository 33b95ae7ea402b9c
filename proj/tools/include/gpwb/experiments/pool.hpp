#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace gpwb::experiments {

// Runs fn(0..count-1) on up to `workers` threads.  Callers write results into
// slots indexed by task, so output order never depends on scheduling.  The
// exception of the lowest failing index is rethrown.
inline void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
  if (count <= 0) return;
  const int threads = std::clamp(workers, 1, count);
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (int i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
          }
        }
      });
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Independent stream per task: splitmix64 of (seed, index).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace gpwb::experiments
