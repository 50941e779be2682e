#pragma once

#include <cstddef>
#include <functional>

namespace fvproj {

/// Worker cap: FVPROJ_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
int worker_count();

/// Runs body(begin, end) over [0, n) split into contiguous blocks. Falls back to
/// a single call when n < grain or only one worker is available. Blocks write
/// disjoint outputs, so results do not depend on the thread count.
void parallel_blocks(std::size_t n, std::size_t grain,
                     const std::function<void(std::size_t, std::size_t)>& body);

/// Pairwise (cascade) sum; fixed association order for a given length.
double pairwise_sum(const double* x, std::size_t n);

}  // namespace fvproj
