#pragma once

#include <cstddef>
#include <functional>

namespace cpinn {

/// Worker threads used for point-parallel evaluation. Resolution order:
/// programmatic override, CPINN_THREADS environment variable, hardware
/// concurrency. Always >= 1.
int worker_count();
void set_worker_count(int n); // 0 restores environment/hardware resolution

/// Splits [0, n) into a fixed number of chunks that does NOT depend on the
/// worker count, runs `body(chunk_index, begin, end)` for each chunk (on
/// worker threads when more than one is configured), and returns once all
/// chunks completed. Callers accumulate per-chunk partial results and merge
/// them in chunk order, which makes the floating-point reduction identical
/// for every worker count.
///
/// The chunk count for a given n is stable: min(kChunks, n).
inline constexpr std::size_t kChunks = 16;

std::size_t chunk_count(std::size_t n);

void for_each_chunk(std::size_t n,
                    const std::function<void(std::size_t chunk, std::size_t begin,
                                             std::size_t end)>& body);

} // namespace cpinn
