#pragma once

// Deterministic index-space parallelism: tasks are pure functions of their
// index writing to disjoint slots, so results never depend on the worker
// count or schedule.

#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace treechain {

template <class Fn>
void parallel_for(std::uint64_t count, int workers, Fn&& fn) {
  if (count == 0) return;
  const unsigned n_threads =
      workers <= 1 ? 1u
                   : static_cast<unsigned>(
                         std::min<std::uint64_t>(static_cast<std::uint64_t>(workers), count));
  if (n_threads == 1) {
    for (std::uint64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::uint64_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(n_threads - 1);
  for (unsigned t = 0; t + 1 < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

}  // namespace treechain
