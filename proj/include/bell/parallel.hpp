#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace bell {

inline int resolve_threads(int threads) {
    if (threads > 0) return threads;
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

// Splits [0, count) into contiguous chunks, one worker thread per chunk.
// fn(chunk_index, begin, end) must not touch other chunks' state.
template <class Fn>
void parallel_chunks(std::size_t count, int threads, Fn&& fn) {
    int nt = resolve_threads(threads);
    if (count == 0) return;
    if (nt <= 1 || count < 2) {
        fn(0, std::size_t{0}, count);
        return;
    }
    std::size_t workers = std::min<std::size_t>(nt, count);
    std::size_t chunk = (count + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t begin = w * chunk;
        std::size_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&fn, w, begin, end] { fn(w, begin, end); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace bell
