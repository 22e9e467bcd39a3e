#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace kdual {

/* Runs fn(i) for i in [0, count) on up to `jobs` threads; rethrows the first exception. */
template <class Fn> void parallel_for(std::size_t count, unsigned jobs, Fn fn)
{
        if (jobs <= 1 || count <= 1) {
                for (std::size_t i = 0; i < count; i++)
                        fn(i);
                return;
        }
        std::atomic<std::size_t> next{0};
        std::exception_ptr err;
        std::mutex mu;
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < jobs && t < count; t++)
                pool.emplace_back([&] {
                        for (std::size_t i; (i = next++) < count;) {
                                try {
                                        fn(i);
                                } catch (...) {
                                        std::lock_guard<std::mutex> lock(mu);
                                        if (!err)
                                                err = std::current_exception();
                                }
                        }
                });
        for (auto &th : pool)
                th.join();
        if (err)
                std::rethrow_exception(err);
}

} // namespace kdual
