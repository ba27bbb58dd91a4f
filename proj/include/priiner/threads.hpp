#pragma once

// Intra-reconstruction parallelism is capped by the PRIINER_THREADS
// environment variable (default 1). Reductions are performed in fixed chunk
// order, so results are reproducible bit-for-bit at a fixed thread count.

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace priiner {

inline unsigned thread_count() {
  if (const char* env = std::getenv("PRIINER_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return unsigned(n);
  }
  return 1;
}

// Runs fn(chunk_index, begin, end) over [0, n) split into `chunks` ranges.
template <typename Fn>
void parallel_chunks(std::size_t n, unsigned chunks, Fn&& fn) {
  if (chunks <= 1 || n < 2) {
    fn(0u, std::size_t{0}, n);
    return;
  }
  if (chunks > n) chunks = unsigned(n);
  std::vector<std::thread> pool;
  pool.reserve(chunks);
  for (unsigned t = 0; t < chunks; ++t) {
    const std::size_t b = n * t / chunks;
    const std::size_t e = n * (t + 1) / chunks;
    pool.emplace_back([&fn, t, b, e] { fn(t, b, e); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace priiner
