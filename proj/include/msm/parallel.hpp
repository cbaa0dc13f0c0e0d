#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace msm {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs fn(worker, begin, end) over contiguous chunks of [0, n). Workers own
// disjoint index ranges, so per-worker accumulators combined in worker order
// give the same result on every run with the same thread count.
inline void parallel_chunks(int n, int threads,
                            const std::function<void(int, int, int)>& fn) {
    threads = std::min(std::max(1, threads), std::max(1, n));
    if (threads == 1) {
        fn(0, 0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const int base = n / threads;
    const int extra = n % threads;
    int begin = 0;
    for (int w = 0; w < threads; ++w) {
        const int len = base + (w < extra ? 1 : 0);
        pool.emplace_back(fn, w, begin, begin + len);
        begin += len;
    }
    for (auto& t : pool) t.join();
}

}  // namespace msm
