#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace medliab {

/// Default worker count: hardware concurrency, at least 1.
[[nodiscard]] inline unsigned default_jobs() noexcept {
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls fn(i) for i in [0, count) on up to `jobs` threads. Each index is visited
/// exactly once; callers write results into slot i so output order never depends
/// on scheduling. The first exception thrown by any call is rethrown here.
template <class Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn&& fn) {
    const auto workers = static_cast<std::size_t>(std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(count, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto body = [&] {
        for (std::size_t i = next++; i < count && !failed; i = next++) {
            try {
                fn(i);
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
    pool.clear();
    if (error) std::rethrow_exception(error);
}

}  // namespace medliab
