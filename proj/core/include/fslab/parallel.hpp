#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace fslab {

// Worker count used by parallel loops; 0 means hardware concurrency.
void set_worker_count(unsigned n);
unsigned worker_count();

// Runs body(i) for i in [0, n) on contiguous chunks. Results must be written to
// per-index slots so the outcome does not depend on scheduling. The first
// exception thrown by any worker is rethrown.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex guard;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t lo = n * w / workers;
        const std::size_t hi = n * (w + 1) / workers;
        pool.emplace_back([&, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(guard);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace fslab
