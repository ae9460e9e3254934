#pragma once

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace corpusfit {

inline int resolve_threads(int threads) {
    if (threads > 0) return threads;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Static block partition over [0, n). Each index is processed exactly once;
// callers write results into preallocated per-index slots, so the outcome is
// identical for any worker count.
template <typename Fn>
void parallel_for(std::int64_t n, int threads, Fn&& fn) {
    threads = resolve_threads(threads);
    if (n <= 0) return;
    if (threads <= 1 || n == 1) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const int workers = static_cast<int>(std::min<std::int64_t>(threads, n));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) {
        const std::int64_t begin = n * t / workers;
        const std::int64_t end = n * (t + 1) / workers;
        pool.emplace_back([begin, end, &fn] {
            for (std::int64_t i = begin; i < end; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace corpusfit
