#include "cpinn/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace cpinn {

namespace {

std::atomic<int> g_override{0};

int resolve_workers() {
    const int forced = g_override.load(std::memory_order_relaxed);
    if (forced > 0) return forced;
    if (const char* env = std::getenv("CPINN_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

} // namespace

int worker_count() { return resolve_workers(); }

void set_worker_count(int n) { g_override.store(n > 0 ? n : 0, std::memory_order_relaxed); }

std::size_t chunk_count(std::size_t n) { return std::min(kChunks, n); }

void for_each_chunk(std::size_t n,
                    const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
    if (n == 0) return;
    const std::size_t chunks = chunk_count(n);
    const std::size_t per = (n + chunks - 1) / chunks;

    auto run_chunk = [&](std::size_t c) {
        const std::size_t begin = c * per;
        const std::size_t end = std::min(n, begin + per);
        if (begin < end) body(c, begin, end);
    };

    const int workers = std::min<int>(worker_count(), static_cast<int>(chunks));
    if (workers <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t c = next.fetch_add(1); c < chunks; c = next.fetch_add(1))
                run_chunk(c);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace cpinn
