#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace gsf {

// Runs fn(i) for i in [0, n) on a small thread pool; rethrows the first exception.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, unsigned max_threads = 0)
{
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    unsigned nt = unsigned(std::min<std::size_t>(n, max_threads ? max_threads : hw));
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex m;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nt; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next++;
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(m);
                    if (!err) err = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

} // namespace gsf
