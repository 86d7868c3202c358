#pragma once

// Finite search ranges for the partner count k and the search effort lambda.
// Prices never exceed c(1), so any choice whose fixed cost alone exceeds c(1)
// is dominated by in-house production.

#include "chainsolve/model.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>

namespace chainsolve {

struct Bounds {
  std::int64_t k_bar = 1;
  double lambda_bar = 0.0;
};

inline constexpr double kLambdaBarStep = 0.01;

/// min{k >= 1 : g(k) > c(1)}.
inline std::int64_t compute_k_bar(const ModelSpec& model) {
  const double c1 = model.c_at_one();
  std::int64_t k = 1;
  while (!(model.g(k) > c1)) ++k;
  return k;
}

/// Lower bound on E[g(k)] under effort lambda, from the Poisson median bound
/// nu - 1 >= lambda - ln 2 and P(k >= ceil(nu)) >= 1/2.
inline double expected_g_lower_bound(const ModelSpec& model, double lambda) {
  return 0.5 * model.transaction().g_real(lambda - std::numbers::ln2 + 1.0);
}

/// Smallest lambda on the 0.01 grid whose median bound already reaches c(1).
/// The bound is nondecreasing in lambda, so a bracketing search over grid
/// indices returns the same point as a linear scan.
inline double compute_lambda_bar(const ModelSpec& model) {
  const double c1 = model.c_at_one();
  auto reaches = [&](std::int64_t i) {
    return expected_g_lower_bound(model, static_cast<double>(i) * kLambdaBarStep) >= c1;
  };
  std::int64_t hi = 1;
  while (!reaches(hi)) hi *= 2;
  std::int64_t lo = hi / 2; // reaches(lo) is false unless lo == 0
  if (reaches(lo)) return static_cast<double>(lo) * kLambdaBarStep;
  while (hi - lo > 1) {
    std::int64_t mid = lo + (hi - lo) / 2;
    (reaches(mid) ? hi : lo) = mid;
  }
  return static_cast<double>(hi) * kLambdaBarStep;
}

inline Bounds compute_bounds(const ModelSpec& model) {
  return Bounds{compute_k_bar(model), compute_lambda_bar(model)};
}

} // namespace chainsolve
