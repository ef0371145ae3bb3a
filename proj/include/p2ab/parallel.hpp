#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace p2ab {

// Runs body(chunk) for chunk in [0, chunks) on up to `workers` threads.
// Chunks are handed out dynamically; callers store per-chunk results and
// merge them in chunk order, so output never depends on scheduling.
template <class Body>
void for_each_chunk(std::size_t chunks, unsigned workers, Body&& body) {
    workers = std::max(1U, workers);
    if (workers == 1 || chunks <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) body(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto run = [&] {
        for (std::size_t c; !failed.load() && (c = next.fetch_add(1)) < chunks;) {
            try {
                body(c);
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
            }
        }
    };
    std::vector<std::jthread> pool;
    const unsigned n = static_cast<unsigned>(std::min<std::size_t>(workers, chunks));
    pool.reserve(n);
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(run);
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace p2ab
