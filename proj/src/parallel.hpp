#pragma once

#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace contact::detail {

/// Runs body(i) for i in [0, n) across OpenMP threads. Each index writes
/// only its own output slot, so callers reduce afterwards in index order.
/// The exception from the lowest failing index is rethrown.
template <class Body>
void parallel_for(int n, int jobs, Body&& body) {
  std::exception_ptr error;
  int error_index = n;
  std::mutex error_mutex;
  auto guarded = [&](int i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (i < error_index) {
        error_index = i;
        error = std::current_exception();
      }
    }
  };
#ifdef _OPENMP
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (int i = 0; i < n; ++i) guarded(i);
#else
  (void)jobs;
  for (int i = 0; i < n; ++i) guarded(i);
#endif
  if (error) std::rethrow_exception(error);
}

}  // namespace contact::detail
