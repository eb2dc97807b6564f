#include "cloudlap/threads.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <limits>
#include <thread>

namespace cloudlap {
namespace {

int initial_thread_count() {
    if (const char* env = std::getenv("CLOUDLAP_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

int& thread_count_ref() {
    static int count = initial_thread_count();
    return count;
}

} // namespace

int thread_count() { return thread_count_ref(); }

void set_thread_count(int n) { thread_count_ref() = std::max(1, n); }

void parallel_for_blocks(std::size_t n, std::size_t grain,
                         const std::function<void(std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    if (grain == 0) grain = 1;
    const std::size_t nblocks = (n + grain - 1) / grain;
    const int workers = std::min<int>(thread_count(),
                                      static_cast<int>(std::min<std::size_t>(
                                          nblocks, std::numeric_limits<int>::max())));
    if (workers <= 1) {
        for (std::size_t b = 0; b < nblocks; ++b) {
            const std::size_t lo = b * grain;
            fn(lo, std::min(lo + grain, n));
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    auto run = [&]() {
        for (;;) {
            const std::size_t b = next.fetch_add(1, std::memory_order_relaxed);
            if (b >= nblocks) return;
            const std::size_t lo = b * grain;
            fn(lo, std::min(lo + grain, n));
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers) - 1);
    for (int t = 1; t < workers; ++t) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
}

double parallel_sum_blocks(
    std::size_t n, std::size_t grain,
    const std::function<double(std::size_t, std::size_t)>& block_sum) {
    if (n == 0) return 0.0;
    if (grain == 0) grain = 1;
    const std::size_t nblocks = (n + grain - 1) / grain;
    std::vector<double> partial(nblocks, 0.0);
    parallel_for_blocks(n, grain, [&](std::size_t lo, std::size_t hi) {
        partial[lo / grain] = block_sum(lo, hi);
    });
    double s = 0.0;
    for (std::size_t b = 0; b < nblocks; ++b) s += partial[b];
    return s;
}

double parallel_max_blocks(
    std::size_t n, std::size_t grain,
    const std::function<double(std::size_t, std::size_t)>& block_max) {
    if (n == 0) return 0.0;
    if (grain == 0) grain = 1;
    const std::size_t nblocks = (n + grain - 1) / grain;
    std::vector<double> partial(nblocks, 0.0);
    parallel_for_blocks(n, grain, [&](std::size_t lo, std::size_t hi) {
        partial[lo / grain] = block_max(lo, hi);
    });
    double s = partial[0];
    for (std::size_t b = 1; b < nblocks; ++b)
        if (partial[b] > s) s = partial[b];
    return s;
}

} // namespace cloudlap
