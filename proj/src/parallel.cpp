#include "spincharge/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace spincharge::par {

namespace {
std::atomic<int> g_threads{1};
}

void set_threads(int n) { g_threads = std::max(1, n); }
int threads() { return g_threads; }

void for_blocks(std::size_t n, const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  const std::size_t nb = block_count(n);
  const std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(g_threads.load()), nb);
  auto run = [&](std::size_t t) {
    for (std::size_t b = t; b < nb; b += nt) fn(b, b * block_size, std::min(n, (b + 1) * block_size));
  };
  if (nt <= 1) {
    for (std::size_t b = 0; b < nb; ++b) fn(b, b * block_size, std::min(n, (b + 1) * block_size));
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nt - 1);
  for (std::size_t t = 1; t < nt; ++t) pool.emplace_back(run, t);
  run(0);
  for (auto& th : pool) th.join();
}

}  // namespace spincharge::par
