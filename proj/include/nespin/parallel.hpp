// parallel.hpp — Bounded worker pool for embarrassingly parallel sweeps.
// Workers write results by index, so output order never depends on
// scheduling. NESPIN_THREADS caps the pool; unset falls back to the
// hardware count.

#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace nespin {

inline unsigned worker_count() {
    if (const char* env = std::getenv("NESPIN_THREADS")) {
        long n = std::strtol(env, nullptr, 10);
        if (n >= 1) return static_cast<unsigned>(n);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    unsigned workers = worker_count();
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    if (workers > n) workers = static_cast<unsigned>(n);
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace nespin
