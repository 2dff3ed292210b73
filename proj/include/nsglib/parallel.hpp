#pragma once

#include <algorithm>
#include <cstdint>
#include <thread>
#include <vector>

namespace nsglib {

// Static block partition of [begin, end) across `threads` workers. fn(lo, hi)
// must only write state owned by iterations in [lo, hi), which makes results
// identical for any thread count. threads <= 1 runs inline and is the serial
// reference for determinism tests.
template <typename Fn>
void parallel_blocks(std::uint32_t begin, std::uint32_t end, int threads, Fn&& fn) {
  if (end <= begin) return;
  std::uint32_t count = end - begin;
  std::uint32_t nt = threads <= 1 ? 1u : std::min<std::uint32_t>(static_cast<std::uint32_t>(threads), count);
  if (nt == 1) {
    fn(begin, end);
    return;
  }
  std::uint32_t chunk = (count + nt - 1) / nt;
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (std::uint32_t t = 0; t < nt; ++t) {
    std::uint32_t lo = begin + t * chunk;
    if (lo >= end) break;
    std::uint32_t hi = std::min(end, lo + chunk);
    pool.emplace_back([lo, hi, &fn] { fn(lo, hi); });
  }
  for (auto& th : pool) th.join();
}

template <typename Fn>
void parallel_for(std::uint32_t begin, std::uint32_t end, int threads, Fn&& fn) {
  parallel_blocks(begin, end, threads, [&fn](std::uint32_t lo, std::uint32_t hi) {
    for (std::uint32_t i = lo; i < hi; ++i) fn(i);
  });
}

}  // namespace nsglib
