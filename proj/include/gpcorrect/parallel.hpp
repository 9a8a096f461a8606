#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#include <omp.h>

namespace gpc {

/// Run body(i) for i in [0, n) on the OpenMP team.  Iterations must write
/// to disjoint outputs.  If any iteration throws, the exception from the
/// lowest index is rethrown after the loop, so failures are reported the
/// same way regardless of thread count.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// Same contract as parallel_for, executed in index order on the caller.
template <class Body>
void serial_for(std::size_t n, Body&& body) {
  for (std::size_t i = 0; i < n; ++i) body(i);
}

inline void set_thread_count(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

}  // namespace gpc
