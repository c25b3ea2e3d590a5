// Minimal data-parallel loop used for the per-node VI selections.
//
// FPDVI_THREADS caps the worker count (0 or unset = hardware concurrency).
// Work is split into contiguous static chunks, one per worker, so results
// land in caller-owned slots and the outcome is independent of scheduling.
// Exceptions from workers are rethrown on the calling thread (first one
// wins; the rest are swallowed once the batch has joined).

#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace fpdvi {

inline int parallel_thread_count() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("FPDVI_THREADS")) {
        char* end = nullptr;
        const long requested = std::strtol(env, &end, 10);
        if (end != env && requested > 0)
            return static_cast<int>(std::min<long>(requested, 256));
        // 0 (or garbage) falls through to auto.
    }
    return static_cast<int>(hw);
}

/// Runs fn(i) for i in [0, count), possibly concurrently.  fn must only
/// touch state owned by index i.
inline void parallel_for(int count, const std::function<void(int)>& fn) {
    if (count <= 0) return;
    const int workers = std::min(parallel_thread_count(), count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }

    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    const int chunk = (count + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const int begin = w * chunk;
        const int end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, begin, end]() {
            try {
                for (int i = begin; i < end; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace fpdvi
