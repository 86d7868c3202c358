#pragma once

#include "chainsolve/operator.hpp"

#include <chrono>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace chainsolve {

enum class Method {
  iterate,   // successive application of the operator from p0 = c
  recursive, // single pass over the grid, each value from the ones below it
};

inline std::string_view to_string(Method m) { return m == Method::iterate ? "iterate" : "recursive"; }

struct Solution {
  PriceFunction price;
  Policy policy;
  Method method = Method::recursive;
  Variant variant = Variant::deterministic;
  /// Operator applications (iterate) or grid minimisations (recursive).
  std::size_t iterations = 0;
  /// sup |Tp - p| on the grid; NaN when not requested.
  double residual = std::numeric_limits<double>::quiet_NaN();
  std::chrono::duration<double> wall_time{0.0};
};

struct SolverOptions {
  double tol = 1e-8;
  std::size_t max_iter = 100000;
  /// Wall-clock budget for the iterative method.
  double max_seconds = std::numeric_limits<double>::infinity();
  /// Starting point for the iterative method; defaults to v0 = c.
  std::optional<PriceFunction> start;
  bool compute_residual = true;
  OperatorOptions op;
};

/// Iteration budget exhausted; carries the last iterate.
class MaxIterationsExceeded : public Error {
public:
  explicit MaxIterationsExceeded(Solution partial)
      : Error("iteration stopped after " + std::to_string(partial.iterations) +
              " steps without meeting the tolerance"),
        partial_(std::move(partial)) {}
  const Solution& partial() const noexcept { return partial_; }

private:
  Solution partial_;
};

inline double residual(const ModelSpec& model, const PriceFunction& p, Variant variant,
                       OperatorOptions options = {}) {
  GridOperator op(model, p.grid_size(), variant, options);
  return sup_distance(op.apply(p).first, p);
}

inline Solution solve_iterative(const ModelSpec& model, std::size_t m, Variant variant,
                                const SolverOptions& options = {}) {
  if (!(options.tol > 0.0)) throw DomainError("tol must be positive");
  if (m < 2) throw DomainError("grid size must be >= 2");
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();

  GridOperator op(model, m, variant, options.op);
  Solution sol;
  sol.method = Method::iterate;
  sol.variant = variant;
  sol.price = options.start ? *options.start : make_v0(model, m);
  if (sol.price.grid_size() != m) throw DomainError("start function has the wrong grid size");

  double step = std::numeric_limits<double>::infinity();
  while (step > options.tol) {
    auto [next, policy] = op.apply(sol.price);
    step = sup_distance(next, sol.price);
    sol.price = std::move(next);
    sol.policy = std::move(policy);
    ++sol.iterations;
    if (step <= options.tol) break;
    double elapsed = std::chrono::duration<double>(clock::now() - start).count();
    if (sol.iterations >= options.max_iter || elapsed > options.max_seconds) {
      sol.residual = step;
      sol.wall_time = clock::now() - start;
      throw MaxIterationsExceeded(std::move(sol));
    }
  }
  if (options.compute_residual) sol.residual = sup_distance(op.apply(sol.price).first, sol.price);
  sol.wall_time = clock::now() - start;
  return sol;
}

/// Builds p(0) = 0, then p(h), p(2h), ..., p(1) in order; each value minimises
/// over t <= s - h, so only already-computed values are read.
inline Solution solve_recursive(const ModelSpec& model, std::size_t m, Variant variant,
                                const SolverOptions& options = {}) {
  if (m < 2) throw DomainError("grid size must be >= 2");
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();

  GridOperator op(model, m, variant, options.op);
  Solution sol;
  sol.method = Method::recursive;
  sol.variant = variant;
  sol.price = PriceFunction::zeros(m);
  sol.policy = op.empty_policy();

  std::vector<UpstreamChoice> q(m + 1);
  for (std::size_t i = 1; i <= m; ++i) {
    q[i - 1] = op.upstream(sol.price, i - 1);
    StageChoice s = op.best_stage(i, i - 1, q);
    sol.price[i] = s.value;
    op.record(sol.policy, i, s);
    ++sol.iterations;
  }
  if (options.compute_residual) sol.residual = sup_distance(op.apply(sol.price).first, sol.price);
  sol.wall_time = clock::now() - start;
  return sol;
}

inline Solution solve(const ModelSpec& model, std::size_t m, Method method, Variant variant,
                      const SolverOptions& options = {}) {
  return method == Method::iterate ? solve_iterative(model, m, variant, options)
                                   : solve_recursive(model, m, variant, options);
}

struct RefineRow {
  std::size_t m = 0;
  /// sup over the finest grid of |p_m - p_finest|, p_m read by interpolation.
  double distance = 0.0;
};

inline std::vector<RefineRow> refine_study(const ModelSpec& model, Variant variant,
                                           const std::vector<std::size_t>& levels,
                                           OperatorOptions op = {}) {
  if (levels.empty()) throw DomainError("refine_study needs at least one level");
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
    if (!(levels[i] < levels[i + 1]) || levels[i + 1] % levels[i] != 0)
      throw DomainError("refinement levels must increase and divide each other");
  }
  SolverOptions options;
  options.compute_residual = false;
  options.op = op;

  std::vector<PriceFunction> prices;
  prices.reserve(levels.size());
  for (std::size_t m : levels) prices.push_back(solve_recursive(model, m, variant, options).price);

  const PriceFunction& finest = prices.back();
  std::vector<RefineRow> table;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    double d = 0.0;
    for (std::size_t i = 0; i <= finest.grid_size(); ++i)
      d = std::max(d, std::abs(prices[l](finest.stage(i)) - finest[i]));
    table.push_back(RefineRow{levels[l], d});
  }
  return table;
}

} // namespace chainsolve
