#pragma once

#include <cstdlib>

#ifdef PHICGC_HAVE_OPENMP
#include <omp.h>
#endif

namespace phicgc {

// Thread cap for data-parallel loops, read once from PHICGC_THREADS.
inline int thread_cap() {
  static const int cap = [] {
    int n = 1;
#ifdef PHICGC_HAVE_OPENMP
    n = omp_get_max_threads();
#endif
    if (const char* env = std::getenv("PHICGC_THREADS")) {
      const int requested = std::atoi(env);
      if (requested > 0) n = requested;
    }
    return n < 1 ? 1 : n;
  }();
  return cap;
}

}  // namespace phicgc
