#pragma once

// Index-parallel loops over independent sweep points.
//
// Exec::serial is the reference path used by the tests; Exec::openmp spreads
// the same body over OpenMP threads. Bodies write only to their own output
// slot, so both paths give identical results.

#include <cstddef>
#include <exception>
#include <mutex>

#include <omp.h>

namespace ep3 {

enum class Exec { serial, openmp };

template <class Body>
void parallel_for(Exec exec, std::size_t n, Body&& body) {
  if (exec == Exec::serial || n < 2) {
    for (std::size_t k = 0; k < n; ++k) body(k);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long long k = 0; k < count; ++k) {
    try {
      body(static_cast<std::size_t>(k));
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

inline int max_threads() { return omp_get_max_threads(); }

}  // namespace ep3
