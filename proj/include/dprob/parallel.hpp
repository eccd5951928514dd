#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace dprob {

// Replicates are processed in fixed-size blocks; block b always draws from
// the RNG stream keyed by b, so results do not depend on the worker count.
inline constexpr std::uint64_t kReplicateBlock = 8192;

inline unsigned resolve_threads(unsigned requested) {
    if (requested > 0)
        return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

// Calls fn(block) for every block in [0, blocks) on up to `threads` workers.
template <typename Fn>
void for_each_block(std::uint64_t blocks, unsigned threads, Fn&& fn) {
    const unsigned workers = static_cast<unsigned>(
        std::min<std::uint64_t>(resolve_threads(threads), std::max<std::uint64_t>(blocks, 1)));
    if (workers <= 1) {
        for (std::uint64_t b = 0; b < blocks; ++b)
            fn(b);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            try {
                for (std::uint64_t b = next++; b < blocks && !failed; b = next++)
                    fn(b);
            } catch (...) {
                if (!failed.exchange(true))
                    failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

}  // namespace dprob
