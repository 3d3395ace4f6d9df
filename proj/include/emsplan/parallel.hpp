#ifndef EMSPLAN_PARALLEL_HPP
#define EMSPLAN_PARALLEL_HPP

#include <cstddef>
#include <thread>
#include <vector>

namespace emsplan {

/// Run fn(i) for i in [0, n) on up to `threads` workers (0 = hardware count).
/// Iterations must be independent; results may not depend on scheduling.
template <typename Fn>
void parallelFor(std::size_t n, unsigned threads, Fn&& fn) {
    if (n == 0) {
        return;
    }
    unsigned workers = threads == 0 ? std::thread::hardware_concurrency() : threads;
    if (workers <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    if (workers > n) {
        workers = static_cast<unsigned>(n);
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t begin = static_cast<std::size_t>(w) * chunk;
        const std::size_t end = begin + chunk < n ? begin + chunk : n;
        if (begin >= end) {
            break;
        }
        pool.emplace_back([begin, end, &fn]() {
            for (std::size_t i = begin; i < end; ++i) {
                fn(i);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
}

}  // namespace emsplan

#endif
