#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace qwalk {

/// Runs fn(begin, end) over contiguous blocks of [begin, end) on `threads`
/// workers. threads <= 1 runs inline. Blocks only partition the work; callers
/// must make the result independent of the partition (e.g. by writing
/// per-index outputs and reducing with tree_reduce).
inline void parallel_blocks(int begin, int end, int threads,
                            const std::function<void(int, int)>& fn) {
    const int count = end - begin;
    if (threads <= 1 || count <= 1) {
        if (count > 0) fn(begin, end);
        return;
    }
    const int workers = std::min(threads, count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        const int lo = begin + static_cast<int>(static_cast<long long>(count) * w / workers);
        const int hi = begin + static_cast<int>(static_cast<long long>(count) * (w + 1) / workers);
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

/// Pairwise reduction with a shape fixed by the element count alone, so sums
/// are bitwise reproducible for any thread partition. Reduces in place.
template <class T, class Combine>
T tree_reduce(std::vector<T>& parts, Combine combine) {
    if (parts.empty()) return T{};
    std::size_t size = parts.size();
    while (size > 1) {
        const std::size_t half = size / 2;
        for (std::size_t i = 0; i < half; ++i)
            parts[i] = combine(parts[2 * i], parts[2 * i + 1]);
        if (size % 2)  // odd element rides along to the next round
            parts[half] = parts[size - 1];
        size = half + size % 2;
    }
    return parts[0];
}

} // namespace qwalk
