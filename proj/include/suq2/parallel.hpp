#pragma once

// Deterministic parallel map: results land in an index-addressed vector and
// every reduction happens in index order, so output bits do not depend on
// the worker count.

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace suq2 {

template <typename T, typename Fn>
std::vector<T> parallel_map_indexed(int n, int threads, Fn&& fn) {
    std::vector<T> out(n);
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    int workers = std::min(threads, n);
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) out[i] = fn(i);
        });
    for (auto& th : pool) th.join();
    return out;
}

}  // namespace suq2
