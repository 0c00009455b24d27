#ifndef FCLT_PARALLEL_HPP
#define FCLT_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace fclt {

inline std::size_t resolve_threads(std::size_t requested) noexcept
{
    if (requested > 0)
        return requested;
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, count) on up to `threads` workers. Work items must
/// write only to their own slot. Workers stop picking up items after a failure;
/// the failure with the lowest index among those seen is rethrown.
template <typename Body>
void parallel_for(std::size_t count, std::size_t threads, Body&& body)
{
    threads = std::min(resolve_threads(threads), std::max<std::size_t>(count, 1));
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::size_t error_index = count;
    std::exception_ptr error;

    auto worker = [&] {
        while (!failed.load(std::memory_order_relaxed)) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count)
                return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (i < error_index) {
                    error_index = i;
                    error = std::current_exception();
                }
                failed.store(true, std::memory_order_relaxed);
            }
        }
    };

    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t k = 0; k < threads; ++k)
            pool.emplace_back(worker);
    }
    if (error)
        std::rethrow_exception(error);
}

} // namespace fclt

#endif
