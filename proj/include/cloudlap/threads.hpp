#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace cloudlap {

// Worker count for parallel regions. Initialized from CLOUDLAP_THREADS when
// set, otherwise from hardware_concurrency. The CLI --threads flag overrides
// both. Results never depend on this value: work is cut into fixed blocks
// and per-block results are combined in block order.
int thread_count();
void set_thread_count(int n);

// Runs fn(begin, end) for consecutive blocks of [0, n). Block boundaries
// depend only on n and grain. Blocks may run on any thread in any order,
// so fn must only write to disjoint per-index or per-block state.
void parallel_for_blocks(std::size_t n, std::size_t grain,
                         const std::function<void(std::size_t, std::size_t)>& fn);

// Sum of block_sum(begin, end) over the same fixed blocks, accumulated in
// increasing block order regardless of which thread produced each partial.
double parallel_sum_blocks(
    std::size_t n, std::size_t grain,
    const std::function<double(std::size_t, std::size_t)>& block_sum);

// Max of block_max(begin, end) over the fixed blocks (order-insensitive).
double parallel_max_blocks(
    std::size_t n, std::size_t grain,
    const std::function<double(std::size_t, std::size_t)>& block_max);

} // namespace cloudlap
