#include "fvproj/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace fvproj {

int worker_count() {
  static const int count = [] {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    hw = std::max(hw, 1);
    if (const char* env = std::getenv("FVPROJ_THREADS")) {
      try {
        const int cap = std::stoi(env);
        if (cap > 0) {
          return std::min(cap, hw);
        }
      } catch (const std::exception&) {
      }
    }
    return hw;
  }();
  return count;
}

void parallel_blocks(std::size_t n, std::size_t grain,
                     const std::function<void(std::size_t, std::size_t)>& body) {
  const auto workers = static_cast<std::size_t>(worker_count());
  if (n < grain || workers <= 1) {
    body(0, n);
    return;
  }
  const std::size_t blocks = std::min(workers, (n + grain - 1) / grain);
  const std::size_t chunk = (n + blocks - 1) / blocks;
  std::vector<std::thread> threads;
  threads.reserve(blocks - 1);
  for (std::size_t b = 1; b < blocks; ++b) {
    const std::size_t lo = b * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo < hi) {
      threads.emplace_back(body, lo, hi);
    }
  }
  body(0, std::min(n, chunk));
  for (auto& t : threads) {
    t.join();
  }
}

double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

}  // namespace fvproj
