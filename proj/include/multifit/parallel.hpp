#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace multifit {

/// Worker count: MULTIFIT_THREADS when set (clamped to >= 1), otherwise
/// the hardware concurrency. Read on every call so tests can change the
/// variable between runs.
inline int max_threads() {
    if (const char* env = std::getenv("MULTIFIT_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<int>(v);
        return 1;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Runs body(begin, end) over a static partition of [0, n). Each index is
/// processed exactly once by exactly one worker, so any computation whose
/// per-index result does not depend on other indices is identical for
/// every worker count.
inline void parallel_chunks(int n, const std::function<void(int, int)>& body) {
    if (n <= 0) return;
    const int workers = std::min(max_threads(), n);
    if (workers <= 1) {
        body(0, n);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(workers);
    const int chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const int begin = w * chunk;
        const int end = std::min(n, begin + chunk);
        if (begin >= end) break;
        threads.emplace_back([&body, begin, end] { body(begin, end); });
    }
    for (auto& t : threads) t.join();
}

}  // namespace multifit
