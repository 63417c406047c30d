#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace lcd {

// Fixed-size block partition; per-block results are combined in block order so
// reductions are bitwise deterministic for any thread count.
inline constexpr std::int64_t kBlock = 8192;

template <class Body>
void parallel_for_blocks(std::int64_t count, int threads, Body&& body) {
  std::int64_t nblocks = (count + kBlock - 1) / kBlock;
  if (threads <= 1 || nblocks <= 1) {
    for (std::int64_t b = 0; b < nblocks; ++b)
      body(b, b * kBlock, std::min(count, (b + 1) * kBlock));
    return;
  }
  std::atomic<std::int64_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::int64_t b = next.fetch_add(1);
      if (b >= nblocks) return;
      body(b, b * kBlock, std::min(count, (b + 1) * kBlock));
    }
  };
  std::vector<std::thread> pool;
  int nt = std::min<std::int64_t>(threads, nblocks);
  pool.reserve(nt);
  for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

template <class Fn>
double parallel_sum(std::int64_t count, int threads, Fn&& per_index) {
  std::int64_t nblocks = (count + kBlock - 1) / kBlock;
  std::vector<double> partial(nblocks, 0.0);
  parallel_for_blocks(count, threads, [&](std::int64_t b, std::int64_t lo, std::int64_t hi) {
    double s = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) s += per_index(i);
    partial[b] = s;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace lcd
