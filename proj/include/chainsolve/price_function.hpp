#pragma once

#include "chainsolve/error.hpp"
#include "chainsolve/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace chainsolve {

/// Grid values on {0, h, ..., 1} with h = 1/m, read back by piecewise-linear
/// interpolation.
class PriceFunction {
public:
  PriceFunction() = default;
  explicit PriceFunction(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) throw DomainError("price function needs at least two grid values");
  }

  static PriceFunction zeros(std::size_t m) { return PriceFunction(std::vector<double>(m + 1, 0.0)); }

  std::size_t grid_size() const noexcept { return values_.size() - 1; }
  double step() const noexcept { return 1.0 / static_cast<double>(grid_size()); }
  double stage(std::size_t i) const noexcept {
    return static_cast<double>(i) / static_cast<double>(grid_size());
  }

  std::span<const double> values() const noexcept { return values_; }
  std::vector<double>& mutable_values() noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  /// p(x) for x in [0,1].
  double operator()(double x) const noexcept {
    const std::size_t m = grid_size();
    double pos = std::clamp(x, 0.0, 1.0) * static_cast<double>(m);
    auto lo = static_cast<std::size_t>(pos);
    if (lo >= m) return values_[m];
    double frac = pos - static_cast<double>(lo);
    if (frac == 0.0) return values_[lo];
    return values_[lo] + (values_[lo + 1] - values_[lo]) * frac;
  }

  /// p(j h / k) without forming the real argument.
  double at_ratio(std::size_t j, std::size_t k) const noexcept {
    std::size_t lo = j / k;
    std::size_t rem = j % k;
    if (rem == 0) return values_[lo];
    return values_[lo] +
           (values_[lo + 1] - values_[lo]) * (static_cast<double>(rem) / static_cast<double>(k));
  }

  /// Invariants: p(0) = 0, finite and nonnegative.
  bool valid() const noexcept {
    if (values_.size() < 2 || values_[0] != 0.0) return false;
    return std::all_of(values_.begin(), values_.end(),
                       [](double v) { return std::isfinite(v) && v >= 0.0; });
  }

  friend bool operator==(const PriceFunction&, const PriceFunction&) = default;

private:
  std::vector<double> values_;
};

inline double sup_distance(const PriceFunction& a, const PriceFunction& b) {
  if (a.grid_size() != b.grid_size()) throw DomainError("sup_distance: grid sizes differ");
  double d = 0.0;
  for (std::size_t i = 0; i <= a.grid_size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

/// u0(s) = c'(0) s.
inline PriceFunction make_u0(const ModelSpec& model, std::size_t m) {
  if (m < 1) throw DomainError("grid size must be >= 1");
  std::vector<double> v(m + 1);
  for (std::size_t i = 0; i <= m; ++i)
    v[i] = model.lower_slope() * (static_cast<double>(i) / static_cast<double>(m));
  return PriceFunction(std::move(v));
}

/// v0(s) = c(s).
inline PriceFunction make_v0(const ModelSpec& model, std::size_t m) {
  if (m < 1) throw DomainError("grid size must be >= 1");
  std::vector<double> v(m + 1);
  for (std::size_t i = 0; i <= m; ++i) v[i] = model.c(static_cast<double>(i) / static_cast<double>(m));
  return PriceFunction(std::move(v));
}

} // namespace chainsolve
