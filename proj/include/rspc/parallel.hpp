#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <thread>
#include <vector>

namespace rspc {

// Worker count resolution: explicit request, else RSPC_THREADS, else hardware.
inline unsigned effective_worker_count(unsigned requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("RSPC_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

inline constexpr std::uint64_t kDefaultBlockSize = 4096;

// Runs fn(block_index, begin, end) over [0, total) split into fixed-size
// blocks. Block boundaries depend only on total and block_size, never on the
// worker count, so per-block partial results indexed by block can later be
// combined in a fixed order to give worker-count-independent output.
template <typename Fn>
void for_each_block(std::uint64_t total, std::uint64_t block_size, unsigned workers, Fn&& fn) {
  if (total == 0) return;
  if (block_size == 0) block_size = kDefaultBlockSize;
  const std::uint64_t nblocks = (total + block_size - 1) / block_size;
  const unsigned nworkers = static_cast<unsigned>(
      std::min<std::uint64_t>(effective_worker_count(workers), nblocks));

  std::atomic<std::uint64_t> next{0};
  auto run = [&] {
    for (;;) {
      const std::uint64_t b = next.fetch_add(1, std::memory_order_relaxed);
      if (b >= nblocks) return;
      const std::uint64_t lo = b * block_size;
      const std::uint64_t hi = std::min(total, lo + block_size);
      fn(b, lo, hi);
    }
  };

  if (nworkers <= 1) {
    run();
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nworkers - 1);
  for (unsigned i = 0; i + 1 < nworkers; ++i) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
}

inline std::uint64_t block_count(std::uint64_t total, std::uint64_t block_size) {
  if (block_size == 0) block_size = kDefaultBlockSize;
  return total == 0 ? 0 : (total + block_size - 1) / block_size;
}

// Pairwise tree reduction over per-block partials. The combine order is a
// function of the block count alone, so floating-point results do not depend
// on the number of workers that produced the partials.
template <typename T, typename Combine>
T reduce_pairwise(std::span<T> parts, Combine&& combine) {
  if (parts.size() == 1) return parts[0];
  const std::size_t mid = parts.size() / 2;
  T left = reduce_pairwise(parts.subspan(0, mid), combine);
  T right = reduce_pairwise(parts.subspan(mid), combine);
  combine(left, right);
  return left;
}

}  // namespace rspc
