#pragma once
/**
 * @file   parallel.hpp
 * @brief  Minimal fork-join helper. Work items must be independent; results
 *         never depend on the number of workers.
 */

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sarmover
{
    namespace detail
    {
        inline std::atomic<int> &thread_limit_storage ()
        {
            static std::atomic<int> limit{0};
            return limit;
        }

        inline thread_local bool inside_parallel_region = false;
    } // namespace detail

    /// Cap the number of worker threads (0 = hardware concurrency).
    inline void set_thread_limit (int n) { detail::thread_limit_storage ().store (std::max (0, n)); }

    /// Effective worker count: explicit limit, else SARMOVER_THREADS, else hardware.
    [[nodiscard]] inline int worker_count ()
    {
        int n = detail::thread_limit_storage ().load ();
        if (n <= 0)
        {
            if (const char *env = std::getenv ("SARMOVER_THREADS"))
                n = std::atoi (env);
        }
        if (n <= 0)
            n = static_cast<int> (std::thread::hardware_concurrency ());
        return std::max (1, n);
    }

    /// Run fn(i) for i in [0, count). Static contiguous chunks per worker;
    /// nested calls from inside a worker run serially.
    template <typename Fn> void parallel_for (std::size_t count, Fn &&fn)
    {
        const auto workers = detail::inside_parallel_region ? std::size_t{1} : std::min<std::size_t> (static_cast<std::size_t> (worker_count ()), count);
        if (workers <= 1)
        {
            for (std::size_t i = 0; i < count; ++i)
                fn (i);
            return;
        }

        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> pool;
        pool.reserve (workers);
        const std::size_t chunk = (count + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w)
        {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min (count, begin + chunk);
            if (begin >= end)
                break;
            pool.emplace_back ([&, begin, end] {
                detail::inside_parallel_region = true;
                try
                {
                    for (std::size_t i = begin; i < end; ++i)
                        fn (i);
                }
                catch (...)
                {
                    std::lock_guard lock (failure_mutex);
                    if (!failure)
                        failure = std::current_exception ();
                }
            });
        }
        for (auto &t : pool)
            t.join ();
        if (failure)
            std::rethrow_exception (failure);
    }

} // namespace sarmover
