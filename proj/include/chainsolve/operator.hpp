#pragma once

// The zero-profit operator on a uniform grid and its stochastic counterpart.
//
// For a price p the operator returns
//   Tp(s) = min_{t <= s, k} c(s - t) + g(k) + delta k p(t/k)
// and, when the partner count is Poisson with chosen effort lambda,
//   Tp(s) = min_{t <= s, lambda} c(s - t) + E_lambda[g(k) + delta k p(t/k)].
//
// Both are evaluated as min_t [c(s - t) + Q(t)] where Q(t) is the cheapest way
// to buy the upstream amount t (best k, or best lambda). Q depends on t only,
// so it is computed once per grid point and shared by every stage s >= t.

#include "chainsolve/bounds.hpp"
#include "chainsolve/model.hpp"
#include "chainsolve/parallel.hpp"
#include "chainsolve/poisson.hpp"
#include "chainsolve/price_function.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace chainsolve {

enum class Variant { deterministic, stochastic };

inline std::string_view to_string(Variant v) {
  return v == Variant::deterministic ? "deterministic" : "stochastic";
}

/// Per-grid-point minimisers. `t_index[i]` is t*(i h) / h; exactly one of
/// `k_star` / `lambda_star` is filled, according to `mode`.
struct Policy {
  Variant mode = Variant::deterministic;
  std::vector<std::size_t> t_index;
  std::vector<double> t_star;
  std::vector<std::int64_t> k_star;
  std::vector<double> lambda_star;

  std::size_t size() const noexcept { return t_index.size(); }
};

struct OperatorOptions {
  /// Added to the computed k-bar (sufficiency checks only).
  std::int64_t k_bar_extra = 0;
  /// Added to the computed lambda-bar (sufficiency checks only).
  double lambda_bar_extra = 0.0;
  unsigned threads = 1;
};

/// Cheapest purchase of the upstream amount t = j h.
struct UpstreamChoice {
  double value = 0.0;
  std::int64_t k = 1;
  double lambda = 0.0;
};

/// Minimiser of c(s - t) + Q(t) at a single stage.
struct StageChoice {
  double value = 0.0;
  std::size_t t_index = 0;
  std::int64_t k = 1;
  double lambda = 0.0;
};

inline constexpr double kLambdaCoarseStep = 0.1;
inline constexpr int kLambdaRefineIterations = 40;

/// E_lambda[g(k) + delta k p(t/k)] for real t, summed over k = 1..K(lambda).
inline double expected_upstream_cost(const ModelSpec& model, const PriceFunction& p, double t,
                                     double lambda) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("expected_upstream_cost: t outside [0,1]");
  if (!(lambda >= 0.0)) throw DomainError("expected_upstream_cost: lambda < 0");
  const double delta = model.delta();
  if (lambda == 0.0) return model.g(1) + delta * p(t);
  std::vector<double> w;
  poisson_weights(lambda, w);
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    auto k = static_cast<std::int64_t>(i + 1);
    total += w[i] * (model.g(k) + delta * static_cast<double>(k) * p(t / static_cast<double>(k)));
  }
  return total;
}

/// Grid evaluation of either operator for a fixed model and grid size.
class GridOperator {
public:
  GridOperator(const ModelSpec& model, std::size_t m, Variant variant, OperatorOptions options = {})
      : model_(model), m_(m), variant_(variant), options_(options) {
    if (m < 1) throw DomainError("grid size must be >= 1");
    cost_.resize(m + 1);
    for (std::size_t i = 0; i <= m; ++i) cost_[i] = model.c(static_cast<double>(i) / static_cast<double>(m));
    bounds_.k_bar = compute_k_bar(model) + options.k_bar_extra;
    if (variant == Variant::stochastic)
      bounds_.lambda_bar = compute_lambda_bar(model) + options.lambda_bar_extra;
  }

  const ModelSpec& model() const noexcept { return model_; }
  std::size_t grid_size() const noexcept { return m_; }
  Variant variant() const noexcept { return variant_; }
  const Bounds& bounds() const noexcept { return bounds_; }
  unsigned threads() const noexcept { return options_.threads; }
  /// c(n h).
  double cost(std::size_t n) const noexcept { return cost_[n]; }

  /// Q(j h). Reads p only on [0, j h].
  UpstreamChoice upstream(const PriceFunction& p, std::size_t j) const {
    return variant_ == Variant::deterministic ? best_partner_count(p, j) : best_search_effort(p, j);
  }

  /// min over t-indices 0..j_last of c((i - j) h) + Q(j h).
  /// Ties go to the smaller k (or lambda), then the smaller t.
  StageChoice best_stage(std::size_t i, std::size_t j_last, std::span<const UpstreamChoice> q) const {
    StageChoice best{cost_[i] + q[0].value, 0, q[0].k, q[0].lambda};
    for (std::size_t j = 1; j <= j_last; ++j) {
      double v = cost_[i - j] + q[j].value;
      if (v < best.value || (v == best.value && tie_key(q[j]) < tie_key(best))) {
        best = StageChoice{v, j, q[j].k, q[j].lambda};
      }
    }
    return best;
  }

  /// Tp on the grid with t ranging over {0, h, ..., s}.
  std::pair<PriceFunction, Policy> apply(const PriceFunction& p) const {
    if (p.grid_size() != m_) throw DomainError("operator grid size does not match price function");
    std::vector<UpstreamChoice> q(m_ + 1);
    parallel_for(0, m_ + 1, options_.threads, [&](std::size_t j) { q[j] = upstream(p, j); });

    PriceFunction out = PriceFunction::zeros(m_);
    Policy policy = empty_policy();
    parallel_for(0, m_ + 1, options_.threads, [&](std::size_t i) {
      StageChoice s = best_stage(i, i, q);
      out[i] = s.value;
      record(policy, i, s);
    });
    return {std::move(out), std::move(policy)};
  }

  Policy empty_policy() const {
    Policy policy;
    policy.mode = variant_;
    policy.t_index.assign(m_ + 1, 0);
    policy.t_star.assign(m_ + 1, 0.0);
    if (variant_ == Variant::deterministic)
      policy.k_star.assign(m_ + 1, 1);
    else
      policy.lambda_star.assign(m_ + 1, 0.0);
    return policy;
  }

  void record(Policy& policy, std::size_t i, const StageChoice& s) const {
    policy.t_index[i] = s.t_index;
    policy.t_star[i] = static_cast<double>(s.t_index) / static_cast<double>(m_);
    if (variant_ == Variant::deterministic)
      policy.k_star[i] = s.k;
    else
      policy.lambda_star[i] = s.lambda;
  }

  /// E_lambda[g(k) + delta k p(j h / k)] on the grid; same summation order as
  /// expected_upstream_cost.
  double expected_upstream_at(const PriceFunction& p, std::size_t j, double lambda) const {
    SeriesTerms terms(model_, p, j);
    std::vector<double> w;
    return evaluate(terms, lambda, w).value;
  }

private:
  template <typename Choice>
  double tie_key(const Choice& c) const noexcept {
    return variant_ == Variant::deterministic ? static_cast<double>(c.k) : c.lambda;
  }

  UpstreamChoice best_partner_count(const PriceFunction& p, std::size_t j) const {
    const double delta = model_.delta();
    UpstreamChoice best{model_.g(1) + delta * p[j], 1, 0.0};
    for (std::int64_t k = 2; k <= bounds_.k_bar; ++k) {
      double gk = model_.g(k);
      if (gk > best.value) break; // p >= 0, so every larger k costs at least g(k)
      double v = gk + delta * static_cast<double>(k) * p.at_ratio(j, static_cast<std::size_t>(k));
      if (v < best.value) best = UpstreamChoice{v, k, 0.0};
    }
    return best;
  }

  // Lazily extended table of g(k) + delta k p(j h / k) and g(k).
  struct SeriesTerms {
    SeriesTerms(const ModelSpec& model, const PriceFunction& p, std::size_t j)
        : model(model), p(p), j(j) {}
    void ensure(std::size_t K) {
      const double delta = model.delta();
      while (total.size() < K) {
        auto k = static_cast<std::int64_t>(total.size() + 1);
        double gk = model.g(k);
        fixed.push_back(gk);
        total.push_back(gk + delta * static_cast<double>(k) * p.at_ratio(j, static_cast<std::size_t>(k)));
      }
    }
    const ModelSpec& model;
    const PriceFunction& p;
    std::size_t j;
    std::vector<double> total;
    std::vector<double> fixed;
  };

  struct SeriesValue {
    double value;
    double expected_g;
  };

  SeriesValue evaluate(SeriesTerms& terms, double lambda, std::vector<double>& w) const {
    if (lambda == 0.0) {
      terms.ensure(1);
      return {terms.total[0], terms.fixed[0]};
    }
    poisson_weights(lambda, w);
    terms.ensure(w.size());
    double value = 0.0;
    double eg = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      value += w[i] * terms.total[i];
      eg += w[i] * terms.fixed[i];
    }
    return {value, eg};
  }

  // Coarse scan over {0, 0.1, ...} up to the effective bound, then ternary
  // refinement inside the best coarse cell.
  UpstreamChoice best_search_effort(const PriceFunction& p, std::size_t j) const {
    SeriesTerms terms(model_, p, j);
    std::vector<double> w;
    const double lambda_bar = bounds_.lambda_bar;
    const double c1 = model_.c_at_one();

    UpstreamChoice best{evaluate(terms, 0.0, w).value, 1, 0.0};
    for (std::int64_t n = 1;; ++n) {
      double lambda = static_cast<double>(n) * kLambdaCoarseStep;
      bool last = false;
      if (lambda >= lambda_bar) {
        lambda = lambda_bar;
        last = true;
      }
      if (lambda <= 0.0) break;
      SeriesValue sv = evaluate(terms, lambda, w);
      if (sv.value < best.value) best = UpstreamChoice{sv.value, 1, lambda};
      // E[g] bounds the objective from below and grows with lambda.
      if (sv.expected_g > best.value) break;
      if (sv.value > best.value + c1) break;
      if (last) break;
    }

    double lo = std::max(0.0, best.lambda - kLambdaCoarseStep);
    double hi = std::min(lambda_bar, best.lambda + kLambdaCoarseStep);
    if (hi > lo) {
      for (int it = 0; it < kLambdaRefineIterations; ++it) {
        double a = lo + (hi - lo) / 3.0;
        double b = hi - (hi - lo) / 3.0;
        if (evaluate(terms, a, w).value <= evaluate(terms, b, w).value)
          hi = b;
        else
          lo = a;
      }
      double lambda = 0.5 * (lo + hi);
      double v = evaluate(terms, lambda, w).value;
      if (v < best.value) best = UpstreamChoice{v, 1, lambda};
    }
    return best;
  }

  ModelSpec model_;
  std::size_t m_;
  Variant variant_;
  OperatorOptions options_;
  Bounds bounds_;
  std::vector<double> cost_;
};

inline std::pair<PriceFunction, Policy> apply_T(const ModelSpec& model, const PriceFunction& p,
                                                OperatorOptions options = {}) {
  return GridOperator(model, p.grid_size(), Variant::deterministic, options).apply(p);
}

inline std::pair<PriceFunction, Policy> apply_T_stochastic(const ModelSpec& model, const PriceFunction& p,
                                                           OperatorOptions options = {}) {
  return GridOperator(model, p.grid_size(), Variant::stochastic, options).apply(p);
}

} // namespace chainsolve
