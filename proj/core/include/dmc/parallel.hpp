#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace dmc {

//! Runs fn(i) for i in [0, count) split into contiguous chunks across
//! `workers` threads. Chunk boundaries depend only on (count, workers),
//! and callers must write disjoint outputs per index, so results are
//! identical for any worker count.
template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
    if (count == 0) return;
    if (workers <= 1 || count == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const std::size_t nthreads = std::min<std::size_t>(workers, count);
    const std::size_t chunk = (count + nthreads - 1) / nthreads;

    std::vector<std::exception_ptr> errors(nthreads);
    std::vector<std::thread> pool;
    pool.reserve(nthreads - 1);

    auto run_range = [&](std::size_t t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(count, lo + chunk);
        try {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        } catch (...) {
            errors[t] = std::current_exception();
        }
    };

    for (std::size_t t = 1; t < nthreads; ++t) pool.emplace_back(run_range, t);
    run_range(0);
    for (auto& th : pool) th.join();

    for (auto& err : errors)
        if (err) std::rethrow_exception(err);
}

} // namespace dmc
