/*
 * parallel.hh
 *
 * Static-partition parallel loop. Each index is processed exactly once
 * and writes only its own output slot, so results are identical for any
 * thread count.
 */

#ifndef PIMC_DETAIL_PARALLEL_HH_
#define PIMC_DETAIL_PARALLEL_HH_

#include <cstddef>
#include <thread>
#include <vector>

namespace pimc {
namespace detail {

template <typename Fn>
inline void parallel_for(std::size_t n, int threads, const Fn& fn) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t t = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  std::vector<std::thread> pool;
  pool.reserve(t);
  const std::size_t chunk = (n + t - 1) / t;
  for (std::size_t w = 0; w < t; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&fn, lo, hi]() {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace detail
}  // namespace pimc

#endif  // PIMC_DETAIL_PARALLEL_HH_
