#pragma once

// Trial-level parallelism for Monte Carlo loops. Every kernel writes its
// result into a per-trial slot and reductions run serially afterwards, so
// outputs are bit-identical no matter the thread count. EDMLAB_THREADS
// caps the worker pool.

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace edm {

enum class Exec { Serial, Parallel };

inline int max_threads() {
#ifdef _OPENMP
  int n = omp_get_max_threads();
#else
  int n = 1;
#endif
  if (const char* env = std::getenv("EDMLAB_THREADS")) {
    int cap = std::atoi(env);
    if (cap > 0 && cap < n) n = cap;
  }
  return n;
}

template <class F>
void run_trials(int n, Exec mode, F&& body) {
  if (mode == Exec::Serial) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
#ifdef _OPENMP
  const int threads = max_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
  for (int i = 0; i < n; ++i) body(i);
#else
  for (int i = 0; i < n; ++i) body(i);
#endif
}

}  // namespace edm
