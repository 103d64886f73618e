#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace ois {

/// Runs fn(i) for i in [0, count), split into contiguous ranges across
/// `threads` workers. Worker t is passed its thread id as the second
/// argument so callers can keep per-thread scratch state. Results must be
/// written to disjoint, index-addressed slots; no reduction is performed
/// here, so output cannot depend on scheduling.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    if (count == 0) return;
    if (threads <= 1 || count == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i, 0u);
        return;
    }
    const unsigned t_count =
        static_cast<unsigned>(std::min<std::size_t>(threads, count));
    std::vector<std::thread> pool;
    pool.reserve(t_count);
    for (unsigned t = 0; t < t_count; ++t) {
        pool.emplace_back([&, t] {
            const std::size_t lo = count * t / t_count;
            const std::size_t hi = count * (t + 1) / t_count;
            for (std::size_t i = lo; i < hi; ++i) fn(i, t);
        });
    }
    for (auto& th : pool) th.join();
}

inline unsigned hardware_threads() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

}  // namespace ois
