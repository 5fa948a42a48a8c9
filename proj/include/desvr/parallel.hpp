#ifndef DESVR_PARALLEL_HPP
#define DESVR_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace desvr {

/// Number of worker threads to use for a requested count; 0 means "all cores".
inline unsigned resolve_threads(unsigned requested)
{
    if (requested != 0)
        return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers.
///
/// Each index is processed exactly once. If any call throws, the exception
/// raised by the smallest index is rethrown after all workers have joined,
/// so the reported failure does not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn)
{
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    auto work = [&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
            try {
                fn(i);
            }
            catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    {
        std::vector<std::jthread> pool;
        pool.reserve(workers - 1);
        for (unsigned t = 1; t < workers; ++t)
            pool.emplace_back(work);
        work();
    }

    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace desvr

#endif
