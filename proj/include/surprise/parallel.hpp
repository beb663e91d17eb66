#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace surprise {

// SURPRISE_THREADS caps internal parallelism (default: hardware concurrency).
inline unsigned max_threads() {
    if (const char* env = std::getenv("SURPRISE_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

// Runs f(i) for i in [0, n).  Workers own disjoint index strides; callers get
// determinism by writing results into slot i only.
template <typename F>
void parallel_for(std::size_t n, F&& f) {
    const unsigned threads = std::min<std::size_t>(max_threads(), n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += threads) f(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace surprise
