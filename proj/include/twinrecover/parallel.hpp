#pragma once

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace twinrec {

enum class Exec { Serial, Parallel };

/// Thread count for parallel kernels, capped by TWINRECOVER_THREADS when set.
inline int thread_budget() {
#ifdef _OPENMP
    int n = omp_get_max_threads();
#else
    int n = 1;
#endif
    if (const char* env = std::getenv("TWINRECOVER_THREADS")) {
        try {
            int cap = std::stoi(env);
            if (cap > 0 && cap < n) n = cap;
        } catch (...) {
        }
    }
    return n;
}

}  // namespace twinrec
