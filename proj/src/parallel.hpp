#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mflab::detail {

/// Thread count for a `workers` hint; 0 or negative means the OpenMP default.
inline int thread_count(int workers) {
#ifdef _OPENMP
  return workers > 0 ? workers : omp_get_max_threads();
#else
  (void)workers;
  return 1;
#endif
}

}  // namespace mflab::detail
