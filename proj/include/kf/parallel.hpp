#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace kf {

// Process-wide default worker count (0 = hardware concurrency). Results never
// depend on it: callers write to disjoint per-index slots and reduce in fixed
// order.
inline int& thread_count_setting() {
    static int n = 0;
    return n;
}
inline void set_default_thread_count(int n) { thread_count_setting() = n; }
inline int default_thread_count() {
    const int n = thread_count_setting();
    if (n > 0) return n;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

template <typename F>
void parallel_for(int64_t n, F&& body, int threads = 0) {
    if (n <= 0) return;
    if (threads <= 0) threads = default_thread_count();
    if (threads > n) threads = static_cast<int>(n);
    if (threads <= 1) {
        for (int64_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::exception_ptr first_error;
    std::mutex err_mutex;
    const int64_t chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const int64_t lo = t * chunk;
        const int64_t hi = std::min<int64_t>(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi]() {
            try {
                for (int64_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace kf
