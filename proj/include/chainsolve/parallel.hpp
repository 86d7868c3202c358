#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace chainsolve {

/// Runs fn(i) for i in [begin, end) over `threads` workers in contiguous
/// blocks. fn must only write state owned by index i.
template <typename Fn>
void parallel_for(std::size_t begin, std::size_t end, unsigned threads, Fn&& fn) {
  const std::size_t n = end > begin ? end - begin : 0;
  if (threads <= 1 || n < 2 * static_cast<std::size_t>(threads)) {
    for (std::size_t i = begin; i < end; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  const std::size_t block = (n + threads - 1) / threads;
  for (unsigned w = 0; w < threads; ++w) {
    std::size_t lo = begin + w * block;
    std::size_t hi = std::min(end, lo + block);
    if (lo >= hi) break;
    workers.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
}

/// Thread cap from CHAINSOLVE_THREADS, or `fallback` when unset or invalid.
inline unsigned threads_from_env(unsigned fallback = 1) {
  const char* raw = std::getenv("CHAINSOLVE_THREADS");
  if (raw == nullptr) return fallback;
  try {
    long v = std::stol(raw);
    return v >= 1 ? static_cast<unsigned>(v) : fallback;
  } catch (...) {
    return fallback;
  }
}

} // namespace chainsolve
