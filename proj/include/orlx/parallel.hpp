#pragma once

// Deterministic index-parallel loop: the body writes to per-index slots, so
// results do not depend on the thread count.

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace orlx {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

template <class F>
void parallel_for(long begin, long end, int threads, F&& body) {
    const long count = end - begin;
    if (count <= 0) return;
    threads = std::min<long>(resolve_threads(threads), count);
    if (threads <= 1) {
        for (long i = begin; i < end; ++i) body(i);
        return;
    }
    std::atomic<long> next(begin);
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const long i = next.fetch_add(1);
                if (i >= end) return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(error_mu);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace orlx
