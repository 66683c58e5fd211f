#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace singbsde {

// Work is always cut into blocks of this many paths, whatever the thread
// count, so per-block partial results and their reduction order are fixed.
inline constexpr std::size_t kPathBlock = 4096;

inline unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

// Calls fn(block_index, begin, end) once per block of [0, count).
template <class Fn>
void for_each_block(std::size_t count, std::size_t block, unsigned threads, Fn&& fn) {
    if (count == 0) return;
    const std::size_t n_blocks = (count + block - 1) / block;
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), n_blocks));
    auto run = [&](std::size_t b) { fn(b, b * block, std::min(count, (b + 1) * block)); };
    if (workers <= 1) {
        for (std::size_t b = 0; b < n_blocks; ++b) run(b);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t b = next++; b < n_blocks; b = next++) {
                    try {
                        run(b);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error) error = std::current_exception();
                        next = n_blocks;
                    }
                }
            });
        }
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace singbsde
