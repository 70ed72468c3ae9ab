// This file is part of mep-qlab.
//
// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license in the LICENSE file in the root directory
// of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

#ifndef MEPQLAB_PARALLEL_HPP
#define MEPQLAB_PARALLEL_HPP

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mepqlab {

// Thread count: min(omp max threads, MEPQLAB_THREADS if set).
inline int worker_count() {
#ifdef _OPENMP
  int n = omp_get_max_threads();
#else
  int n = 1;
#endif
  if (const char* env = std::getenv("MEPQLAB_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1 && cap < n) n = cap;
  }
  return n;
}

// Block-deterministic parallel map-reduce.
//
// Work is cut into fixed blocks [block*block_size, ...). Each block computes
// its partial result independently (identical arithmetic regardless of the
// executing thread); partials are then merged serially in block order, so the
// result is bitwise identical for any thread count, including the serial
// reference path (parallel = false).
template <typename Partial, typename BlockFn, typename MergeFn>
Partial block_reduce(std::int64_t n_items, std::int64_t block_size,
                     Partial init, BlockFn block_fn, MergeFn merge_fn,
                     bool parallel) {
  const std::int64_t n_blocks = (n_items + block_size - 1) / block_size;
  std::vector<Partial> partials(static_cast<size_t>(n_blocks), init);

#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(worker_count()) \
    if (parallel)
#endif
  for (std::int64_t b = 0; b < n_blocks; ++b) {
    const std::int64_t lo = b * block_size;
    const std::int64_t hi = std::min(n_items, lo + block_size);
    partials[static_cast<size_t>(b)] = block_fn(b, lo, hi);
  }

  Partial acc = init;
  for (std::int64_t b = 0; b < n_blocks; ++b)
    merge_fn(acc, partials[static_cast<size_t>(b)]);
  return acc;
}

// Deterministic parallel for: each index writes only its own output slot.
template <typename Fn>
void parallel_for(std::int64_t n, Fn fn, bool parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(worker_count()) \
    if (parallel)
#endif
  for (std::int64_t i = 0; i < n; ++i) fn(i);
}

}  // namespace mepqlab

#endif
