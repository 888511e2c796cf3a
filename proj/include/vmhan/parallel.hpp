// Copyright 2026 The vmhan Authors.
// SPDX-License-Identifier: Apache-2.0

// Per-instance parallel loops. Work items write only to their own output
// slots; any reduction is done by the caller afterwards in index order, so
// results are bit-identical for every thread count.

#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace vmhan {

/// Worker count from VMHAN_THREADS. Absent, empty, 0 or unparsable values
/// select the single-threaded reference path (returns 1).
int configured_threads();

/// Calls body(i) for i in [0, n) on up to `threads` OpenMP workers.
/// threads <= 1 runs the plain serial loop. If any call throws, the
/// exception of the lowest failing index is rethrown after the loop.
template <typename Body>
void parallel_for(std::size_t n, int threads, Body&& body) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
#endif
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
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

}  // namespace vmhan
