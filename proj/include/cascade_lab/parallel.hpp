#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "cascade_lab/types.hpp"

namespace cascade {

// 0 means "decide": CASCADE_LAB_WORKERS if set, else the hardware thread count.
inline unsigned resolve_workers(unsigned requested) {
    if (requested > 0)
        return requested;
    if (const char* env = std::getenv("CASCADE_LAB_WORKERS"); env && *env) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (*end != '\0' || v < 1)
            throw InputError(std::string("CASCADE_LAB_WORKERS must be a positive integer, got '") + env + "'");
        return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// Runs body(index) for every index in [0, count) on contiguous blocks.
// body must only write to state owned by its index.
template <class Body>
void parallel_for(std::size_t count, unsigned workers, Body&& body) {
    const std::size_t w = std::min<std::size_t>(std::max(1u, workers), std::max<std::size_t>(count, 1));
    if (w <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(w);
    {
        std::vector<std::jthread> pool;
        pool.reserve(w);
        for (std::size_t t = 0; t < w; ++t) {
            const std::size_t lo = count * t / w, hi = count * (t + 1) / w;
            pool.emplace_back([&, t, lo, hi] {
                try {
                    for (std::size_t i = lo; i < hi; ++i)
                        body(i);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace cascade
