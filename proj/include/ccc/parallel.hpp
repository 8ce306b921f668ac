#pragma once

#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace ccc {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// Static partition of [0, n) over worker threads.  Each item writes into its
// own slot, so the caller's later sequential reduction is independent of the
// thread count.
template <class Fn>
void parallel_for(std::int64_t n, int threads, Fn&& fn) {
    threads = resolve_threads(threads);
    if (n <= 0) return;
    if (threads == 1 || n == 1) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    if (static_cast<std::int64_t>(threads) > n) threads = static_cast<int>(n);

    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
        std::int64_t lo = n * w / threads;
        std::int64_t hi = n * (w + 1) / threads;
        pool.emplace_back([lo, hi, &fn, &first_error]() {
            try {
                for (std::int64_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace ccc
