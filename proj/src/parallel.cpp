#include "selfrocket/parallel.hpp"

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace selfrocket {

namespace {
std::atomic<int> g_jobs{0};
}

int global_jobs() {
    const int j = g_jobs.load(std::memory_order_relaxed);
    if (j > 0) return j;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

void set_global_jobs(int jobs) { g_jobs.store(jobs, std::memory_order_relaxed); }

void parallel_for(std::size_t n, int n_threads, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    int workers = n_threads > 0 ? n_threads : global_jobs();
    if (static_cast<std::size_t>(workers) > n) workers = static_cast<int>(n);

    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }

    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        const std::size_t lo = n * w / workers;
        const std::size_t hi = n * (w + 1) / workers;
        threads.emplace_back([&, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : threads) t.join();
    for (std::size_t i = 0; i < n; ++i)
        if (errors[i]) std::rethrow_exception(errors[i]);
}

} // namespace selfrocket
