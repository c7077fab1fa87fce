#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace cqed {

/// Worker count from CQED_THREADS (default 1).
inline unsigned thread_count() {
    if (const char* env = std::getenv("CQED_THREADS")) {
        try {
            const long n = std::stol(env);
            if (n >= 1) return static_cast<unsigned>(std::min<long>(n, 256));
        } catch (const std::exception&) {
        }
    }
    return 1;
}

/// Calls fn(chunk_begin, chunk_end, chunk_index) over contiguous chunks of
/// [0, n). Chunk boundaries depend only on n and the worker count, so callers
/// that concatenate per-chunk output in chunk order get deterministic results.
template <typename Fn>
void parallel_chunks(std::size_t n, Fn&& fn, unsigned workers = thread_count()) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (workers == 1 || n < 2) {
        fn(std::size_t{0}, n, std::size_t{0});
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t step = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t b = std::min(n, w * step);
        const std::size_t e = std::min(n, b + step);
        pool.emplace_back([&, b, e, w] {
            try {
                fn(b, e, std::size_t{w});
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& err : errors) {
        if (err) std::rethrow_exception(err);
    }
}

/// Number of chunks parallel_chunks will use for n items.
inline std::size_t chunk_count(std::size_t n, unsigned workers = thread_count()) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    return (workers == 1 || n < 2) ? 1 : workers;
}

}  // namespace cqed
