#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>
#include <tbb/partitioner.h>

namespace inert {

/// Chunk width for particle-parallel loops. Reductions are defined over this
/// fixed partition, so results never depend on the worker count.
inline constexpr std::size_t kChunk = 512;

inline std::size_t chunk_count(std::size_t n, std::size_t chunk = kChunk) {
    return (n + chunk - 1) / chunk;
}

/// Calls fn(begin, end, chunk_index) for every chunk of [0, n), possibly concurrently.
template <class Fn>
void parallel_chunks(std::size_t n, Fn&& fn, std::size_t chunk = kChunk) {
    const std::size_t nc = chunk_count(n, chunk);
    if (nc <= 1) {
        if (n > 0) fn(std::size_t{0}, n, std::size_t{0});
        return;
    }
    tbb::parallel_for(
        tbb::blocked_range<std::size_t>(0, nc, 1),
        [&](const tbb::blocked_range<std::size_t>& r) {
            for (std::size_t c = r.begin(); c != r.end(); ++c) {
                const std::size_t b = c * chunk;
                const std::size_t e = b + chunk < n ? b + chunk : n;
                fn(b, e, c);
            }
        },
        tbb::simple_partitioner());
}

/// Pairwise sum with a shape fixed by the input length.
inline double tree_sum(std::span<const double> v) {
    if (v.empty()) return 0.0;
    if (v.size() == 1) return v[0];
    if (v.size() == 2) return v[0] + v[1];
    const std::size_t h = v.size() / 2;
    return tree_sum(v.first(h)) + tree_sum(v.subspan(h));
}

/// Sequential sums inside each kChunk block, then a pairwise tree over blocks.
/// Same arithmetic as the partials produced by parallel_chunks loops.
inline double chunked_sum(std::span<const double> v) {
    const std::size_t nc = chunk_count(v.size());
    std::vector<double> partial(nc, 0.0);
    for (std::size_t c = 0; c < nc; ++c) {
        const std::size_t b = c * kChunk;
        const std::size_t e = b + kChunk < v.size() ? b + kChunk : v.size();
        double s = 0.0;
        for (std::size_t i = b; i < e; ++i) s += v[i];
        partial[c] = s;
    }
    return tree_sum(partial);
}

}  // namespace inert
