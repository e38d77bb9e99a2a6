#pragma once

#include <cstdint>

#if defined(SHEARSYNC_HAVE_OPENMP)
#include <omp.h>
#endif

namespace shearsync {

// Serial reference implementation is kept selectable everywhere the OpenMP
// path exists; results must be bitwise identical between the two (loop
// bodies write disjoint slots and reductions are performed in fixed order).
enum class ExecPolicy { serial, openmp };

inline int hardware_workers() {
#if defined(SHEARSYNC_HAVE_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// Caps the worker pool for every subsequent parallel_for (no-op without
// OpenMP). 0 or negative leaves the runtime default in place.
inline void set_worker_count(int workers) {
#if defined(SHEARSYNC_HAVE_OPENMP)
    if (workers > 0) omp_set_num_threads(workers);
#else
    (void)workers;
#endif
}

template <class Fn>
void parallel_for(ExecPolicy policy, std::int64_t n, Fn&& fn, int workers = 0) {
#if defined(SHEARSYNC_HAVE_OPENMP)
    if (policy == ExecPolicy::openmp) {
        if (workers <= 0) workers = omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
#else
    (void)workers;
    (void)policy;
#endif
    for (std::int64_t i = 0; i < n; ++i) fn(i);
}

}  // namespace shearsync
