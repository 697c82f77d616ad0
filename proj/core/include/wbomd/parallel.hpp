#pragma once

#include <exception>
#include <span>
#include <thread>
#include <utility>
#include <vector>

namespace wbomd {

/// Map a thread-count request to an actual count: values < 1 mean "use the
/// hardware concurrency", everything else is taken literally.
int resolve_thread_count(int requested);

/// Deterministic-sum helper: fixed-order pairwise (cascade) summation over the
/// index range.  The result depends only on the data, never on threading.
double pairwise_sum(std::span<const double> values);

/// Static-chunk parallel loop: body(i) is invoked exactly once for every
/// i in [0, n), partitioned into contiguous chunks over n_threads threads.
/// Each index is processed by exactly one thread, so writing to slot i of a
/// preallocated buffer is race-free and yields results that are independent
/// of the thread count.  The first exception thrown by any body is rethrown.
template <typename Body>
void parallel_for(long n, int n_threads, Body&& body)
{
    if (n <= 0)
        return;
    const int threads = std::min<long>(resolve_thread_count(n_threads), n);
    if (threads <= 1) {
        for (long i = 0; i < n; ++i)
            body(i);
        return;
    }
    const long chunk = (n + threads - 1) / threads;
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            const long lo = t * chunk;
            const long hi = std::min(n, lo + chunk);
            try {
                for (long i = lo; i < hi; ++i)
                    body(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool)
        th.join();
    for (auto& err : errors)
        if (err)
            std::rethrow_exception(err);
}

} // namespace wbomd
