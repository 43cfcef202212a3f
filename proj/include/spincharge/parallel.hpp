#pragma once

#include <cstddef>
#include <functional>
#include <vector>

// Block-partitioned loops with a fixed summation tree: a reduction result
// depends only on the block size, never on how many threads ran the blocks.

namespace spincharge::par {

inline constexpr std::size_t block_size = 4096;

void set_threads(int n);
int threads();

// fn(block, begin, end) for every block of [0, n); blocks are spread over threads.
void for_blocks(std::size_t n, const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

inline std::size_t block_count(std::size_t n) { return (n + block_size - 1) / block_size; }

template <class T>
T pairwise_sum(const std::vector<T>& v, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return v[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

// f(begin, end) -> partial sum of one block (summed sequentially inside the block).
template <class T, class F>
T reduce(std::size_t n, const T& zero, F&& f) {
  const std::size_t nb = block_count(n);
  if (nb == 0) return zero;
  std::vector<T> partial(nb, zero);
  for_blocks(n, [&](std::size_t b, std::size_t begin, std::size_t end) { partial[b] = f(begin, end); });
  return pairwise_sum(partial, 0, nb);
}

}  // namespace spincharge::par
