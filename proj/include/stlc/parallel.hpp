#pragma once

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace stlc {

/// Calls body(i) for i in [0, n) on at most `threads` workers (the caller included).
/// Indices are claimed dynamically; body must only touch index-local state.
template <class Body>
void parallel_for(int n, int threads, Body&& body) {
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) body(i);
  };
  const int nt = std::max(1, std::min(threads, n));
  std::vector<std::thread> pool;
  pool.reserve(nt - 1);
  for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

}  // namespace stlc
