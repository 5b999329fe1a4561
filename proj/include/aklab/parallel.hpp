#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace aklab {

/// Block-deterministic parallel reduction: the index range is split into
/// fixed-size blocks, each block produces a partial result, and partials are
/// merged in block order. The arithmetic is identical for any thread count
/// (including 1), so results are bit-reproducible regardless of --threads.
template <typename R, typename Work, typename Merge>
R parallel_blocks(std::size_t n, std::size_t block_size, int threads,
                  R init, Work&& work, Merge&& merge) {
    if (block_size == 0) block_size = 1;
    const std::size_t n_blocks = (n + block_size - 1) / block_size;
    std::vector<R> partials(n_blocks);

    auto run_block = [&](std::size_t b) {
        const std::size_t lo = b * block_size;
        const std::size_t hi = std::min(n, lo + block_size);
        partials[b] = work(lo, hi);
    };

    if (threads <= 1 || n_blocks <= 1) {
        for (std::size_t b = 0; b < n_blocks; ++b) run_block(b);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (;;) {
                const std::size_t b = next.fetch_add(1);
                if (b >= n_blocks) return;
                run_block(b);
            }
        };
        std::vector<std::thread> pool;
        const int use = std::min<int>(threads, static_cast<int>(n_blocks));
        pool.reserve(use);
        for (int i = 0; i < use; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    R acc = std::move(init);
    for (std::size_t b = 0; b < n_blocks; ++b) merge(acc, std::move(partials[b]));
    return acc;
}

inline constexpr std::size_t kDefaultBlock = 1024;

}  // namespace aklab
