#ifndef RUSTICO_SRC_PARALLEL_HPP
#define RUSTICO_SRC_PARALLEL_HPP

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace rustico::detail {

// Worker count: explicit value, else RUSTICO_JOBS, else hardware concurrency.
inline int resolve_jobs(int jobs) {
    if (jobs > 0)
        return jobs;
    if (const char* env = std::getenv("RUSTICO_JOBS")) {
        const int n = std::atoi(env);
        if (n > 0)
            return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Run fn(i) for i in [0, count) on up to `jobs` threads. The first exception
// thrown by a worker is rethrown on the calling thread after all join.
inline void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
    jobs = resolve_jobs(jobs);
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count || failed.load())
                return;
            try {
                fn(i);
            } catch (...) {
                if (!failed.exchange(true))
                    error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
    pool.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t)
        pool.emplace_back(worker);
    for (auto& th : pool)
        th.join();
    if (failed.load() && error)
        std::rethrow_exception(error);
}

} // namespace rustico::detail

#endif
