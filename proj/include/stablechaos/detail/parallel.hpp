#pragma once

#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace stablechaos::detail {

// Worker count: explicit request wins, then the STABLECHAOS_THREADS
// environment variable, then hardware concurrency.
inline int resolve_thread_count(int requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("STABLECHAOS_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs fn(begin, end, block_index) over a fixed partition of [0, n) into
// n_blocks contiguous blocks.  The partition depends only on (n, n_blocks),
// never on the thread count, so a caller that stores per-block results and
// merges them in block order gets bit-identical output for any thread count.
template <class Fn>
void parallel_blocks(std::size_t n, std::size_t n_blocks, int threads, Fn&& fn) {
  if (n == 0) return;
  n_blocks = std::min(n_blocks == 0 ? n : n_blocks, n);
  const int workers = std::min<int>(resolve_thread_count(threads), static_cast<int>(n_blocks));

  auto run_block = [&](std::size_t b) {
    const std::size_t lo = n * b / n_blocks;
    const std::size_t hi = n * (b + 1) / n_blocks;
    fn(lo, hi, b);
  };

  if (workers <= 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) run_block(b);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t b = next.fetch_add(1); b < n_blocks; b = next.fetch_add(1)) run_block(b);
    });
  }
  for (auto& th : pool) th.join();
}

// Element-wise parallel fill; results land in caller-owned slots, so the
// schedule cannot affect the output.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  parallel_blocks(n, 4 * static_cast<std::size_t>(resolve_thread_count(threads)), threads,
                  [&](std::size_t lo, std::size_t hi, std::size_t) {
                    for (std::size_t i = lo; i < hi; ++i) fn(i);
                  });
}

}  // namespace stablechaos::detail
