#pragma once

// Poisson distribution shifted to start at k = 1:
//   f(k; lambda) = lambda^{k-1} e^{-lambda} / (k-1)!,  k >= 1,
// with the point mass at k = 1 when lambda = 0.

#include "chainsolve/error.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace chainsolve {

inline double poisson_pmf(std::int64_t k, double lambda) {
  if (k < 1) throw DomainError("poisson_pmf: k must be >= 1");
  if (!(lambda >= 0.0)) throw DomainError("poisson_pmf: lambda must be >= 0");
  if (lambda == 0.0) return k == 1 ? 1.0 : 0.0;
  double n = static_cast<double>(k - 1);
  return std::exp(n * std::log(lambda) - lambda - std::lgamma(n + 1.0));
}

/// Number of series terms K(lambda) = ceil(lambda + 12 sqrt(lambda + 1) + 30).
/// The mass above K stays below 1e-12 for lambda <= 1e4.
inline std::size_t truncation_limit(double lambda) {
  return static_cast<std::size_t>(std::ceil(lambda + 12.0 * std::sqrt(lambda + 1.0) + 30.0));
}

/// Fills `w` with f(1..K; lambda), K = truncation_limit(lambda). Evaluated
/// outward from the mode so large lambda does not underflow the anchor term.
inline void poisson_weights(double lambda, std::vector<double>& w) {
  if (lambda == 0.0) {
    w.assign(1, 1.0);
    return;
  }
  const std::size_t K = truncation_limit(lambda);
  w.assign(K, 0.0);
  auto mode = static_cast<std::size_t>(std::floor(lambda)); // index of k = floor(lambda) + 1
  if (mode >= K) mode = K - 1;
  double n = static_cast<double>(mode);
  w[mode] = std::exp(n * std::log(lambda) - lambda - std::lgamma(n + 1.0));
  for (std::size_t i = mode + 1; i < K; ++i) w[i] = w[i - 1] * lambda / static_cast<double>(i);
  for (std::size_t i = mode; i > 0; --i) w[i - 1] = w[i] * static_cast<double>(i) / lambda;
}

/// Mass of f(k; lambda) for k > K.
inline double poisson_tail_mass(double lambda, std::size_t K) {
  if (lambda == 0.0) return 0.0;
  double term = poisson_pmf(static_cast<std::int64_t>(K) + 1, lambda);
  double total = 0.0;
  for (std::size_t k = K + 1; term > 0.0; ++k) {
    total += term;
    double next = term * lambda / static_cast<double>(k);
    if (next < 1e-300 || (next < total * 1e-18 && static_cast<double>(k) > lambda)) break;
    term = next;
  }
  return total;
}

} // namespace chainsolve
