#pragma once

#include <cstddef>
#include <cstdint>

#include "gdens/common.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gdens {

// Draws are processed in fixed-size chunks; chunk c always covers the same
// index range and consumes RNG stream (seed, c) regardless of scheduling,
// so Serial and Parallel execution are bitwise identical.
inline constexpr std::size_t chunk_size = 2048;

inline std::size_t chunk_count(std::size_t total) {
    return (total + chunk_size - 1) / chunk_size;
}

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline void set_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

// Runs body(chunk_index, begin, end) over [0, total) in chunks.  The body
// must write only to slots in [begin, end) of shared output arrays.
template <typename Body>
void run_chunked(std::size_t total, Exec exec, Body&& body) {
    const std::int64_t chunks = static_cast<std::int64_t>(chunk_count(total));
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t c = 0; c < chunks; ++c) {
            const std::size_t begin = static_cast<std::size_t>(c) * chunk_size;
            const std::size_t end = begin + chunk_size < total ? begin + chunk_size : total;
            body(static_cast<std::size_t>(c), begin, end);
        }
    } else {
        for (std::int64_t c = 0; c < chunks; ++c) {
            const std::size_t begin = static_cast<std::size_t>(c) * chunk_size;
            const std::size_t end = begin + chunk_size < total ? begin + chunk_size : total;
            body(static_cast<std::size_t>(c), begin, end);
        }
    }
}

// Runs body(i) for each grid index i in [0, n); every index is independent
// and internally deterministic, so the parallel version is bitwise equal.
template <typename Body>
void run_per_index(std::size_t n, Exec exec, Body&& body) {
    const std::int64_t m = static_cast<std::int64_t>(n);
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < m; ++i) body(static_cast<std::size_t>(i));
    } else {
        for (std::int64_t i = 0; i < m; ++i) body(static_cast<std::size_t>(i));
    }
}

} // namespace gdens
