#pragma once

// Equilibrium firm allocations under random partner counts. Starting from the
// firm at s = 1, each firm subcontracts t* to k upstream firms, k drawn from
// the shifted Poisson law with the firm's chosen effort, and each partner
// repeats the choice at stage t*/k. Recursion ends at firms that produce
// everything in-house.

#include "chainsolve/error.hpp"
#include "chainsolve/operator.hpp"
#include "chainsolve/poisson.hpp"
#include "chainsolve/rng.hpp"
#include "chainsolve/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <string>
#include <vector>

namespace chainsolve {

struct FirmNode {
  double stage = 1.0;
  double in_house = 1.0;
  double t_subcontracted = 0.0;
  double lambda = 0.0;
  std::int64_t realized_k = 1;
  double value_added = 0.0;
  /// Minimised cost at this stage, i.e. the zero-profit price the firm charges.
  double price = 0.0;
  std::vector<FirmNode> children;
};

struct NetworkStats {
  std::size_t depth = 0;
  std::size_t n_firms = 0;
  std::vector<std::size_t> per_layer_counts;
  /// Value added of every firm, breadth-first from the root.
  std::vector<double> value_added;
  double value_added_min = 0.0;
  double value_added_max = 0.0;
  double value_added_mean = 0.0;
};

struct ProductionNetwork {
  FirmNode root;
  std::uint64_t seed = 0;
  std::string rng = std::string(CounterRng::kName);
  std::size_t grid_size = 0;
  NetworkStats stats;
};

inline constexpr std::size_t kDefaultMaxDepth = 10000;

/// Draws k >= 1 with probability f(k; lambda) by inversion.
inline std::int64_t sample_partner_count(double lambda, CounterRng& rng) {
  if (!(lambda >= 0.0)) throw DomainError("sample_partner_count: lambda < 0");
  if (lambda == 0.0) return 1;
  std::vector<double> w;
  poisson_weights(lambda, w);
  double u = rng.uniform();
  double cdf = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    cdf += w[i];
    if (u < cdf) return static_cast<std::int64_t>(i + 1);
  }
  return static_cast<std::int64_t>(w.size());
}

inline NetworkStats network_stats(const FirmNode& root) {
  NetworkStats st;
  std::deque<std::pair<const FirmNode*, std::size_t>> queue{{&root, 0}};
  while (!queue.empty()) {
    auto [node, layer] = queue.front();
    queue.pop_front();
    if (st.per_layer_counts.size() <= layer) st.per_layer_counts.resize(layer + 1, 0);
    ++st.per_layer_counts[layer];
    st.depth = std::max(st.depth, layer);
    st.value_added.push_back(node->value_added);
    for (const FirmNode& child : node->children) queue.emplace_back(&child, layer + 1);
  }
  st.n_firms = st.value_added.size();
  auto [lo, hi] = std::minmax_element(st.value_added.begin(), st.value_added.end());
  st.value_added_min = *lo;
  st.value_added_max = *hi;
  double sum = 0.0;
  for (double v : st.value_added) sum += v;
  st.value_added_mean = sum / static_cast<double>(st.n_firms);
  return st;
}

inline NetworkStats network_stats(const ProductionNetwork& net) { return network_stats(net.root); }

/// Firm decisions derived from a stochastic equilibrium price.
class NetworkSimulator {
public:
  NetworkSimulator(const ModelSpec& model, const Solution& solution, OperatorOptions options = {})
      : model_(model), solution_(solution),
        op_(model, solution.price.grid_size(), Variant::stochastic, options) {
    if (solution.variant != Variant::stochastic)
      throw DomainError("network simulation needs a stochastic-variant solution");
    const std::size_t m = solution.price.grid_size();
    upstream_.resize(m + 1);
    parallel_for(0, m + 1, options.threads,
                 [&](std::size_t j) { upstream_[j] = op_.upstream(solution_.price, j); });
  }

  struct Decision {
    double t = 0.0;
    double lambda = 0.0;
    double price = 0.0;
  };

  /// Grid stages reuse the stored policy; any other stage is re-optimised over
  /// grid t <= s - h with the exact c(s - t).
  Decision decide(double s) const {
    const std::size_t m = solution_.price.grid_size();
    const double pos = s * static_cast<double>(m);
    const double nearest = std::round(pos);
    if (std::abs(pos - nearest) <= 1e-9) {
      auto i = static_cast<std::size_t>(nearest);
      return Decision{solution_.policy.t_star[i], solution_.policy.lambda_star[i], solution_.price[i]};
    }
    const auto below = static_cast<std::size_t>(std::floor(pos));
    if (below == 0) return Decision{0.0, 0.0, model_.c(s)};

    const double h = 1.0 / static_cast<double>(m);
    std::size_t best_j = 0;
    double best = model_.c(s) + upstream_[0].value;
    for (std::size_t j = 1; j + 1 <= below; ++j) {
      double v = model_.c(s - static_cast<double>(j) * h) + upstream_[j].value;
      if (v < best || (v == best && upstream_[j].lambda < upstream_[best_j].lambda)) {
        best = v;
        best_j = j;
      }
    }
    return Decision{static_cast<double>(best_j) * h, upstream_[best_j].lambda, best};
  }

  ProductionNetwork simulate(std::uint64_t seed, std::size_t max_depth = kDefaultMaxDepth) const {
    ProductionNetwork net;
    net.seed = seed;
    net.grid_size = solution_.price.grid_size();
    net.root = grow(1.0, CounterRng::from_seed(seed), 0, max_depth);
    net.stats = network_stats(net.root);
    return net;
  }

  const Solution& solution() const noexcept { return solution_; }
  const ModelSpec& model() const noexcept { return model_; }

private:
  FirmNode grow(double s, CounterRng rng, std::size_t depth, std::size_t max_depth) const {
    if (depth > max_depth) throw DepthExceeded("network depth exceeded " + std::to_string(max_depth));
    Decision d = decide(s);
    FirmNode node;
    node.stage = s;
    node.price = d.price;
    node.lambda = d.lambda;
    if (d.t <= 0.0) {
      node.in_house = s;
      node.t_subcontracted = 0.0;
      node.realized_k = 1;
      node.value_added = model_.c(s);
      return node;
    }
    node.t_subcontracted = d.t;
    node.in_house = s - d.t;
    node.realized_k = sample_partner_count(d.lambda, rng);
    node.value_added = model_.c(s - d.t) + model_.g(node.realized_k);
    const double child_stage = d.t / static_cast<double>(node.realized_k);
    node.children.reserve(static_cast<std::size_t>(node.realized_k));
    for (std::int64_t c = 0; c < node.realized_k; ++c)
      node.children.push_back(grow(child_stage, rng.split(static_cast<std::uint64_t>(c)), depth + 1, max_depth));
    return node;
  }

  ModelSpec model_;
  Solution solution_;
  GridOperator op_;
  std::vector<UpstreamChoice> upstream_;
};

inline ProductionNetwork simulate_network(const ModelSpec& model, const Solution& solution,
                                          std::uint64_t seed, std::size_t max_depth = kDefaultMaxDepth) {
  return NetworkSimulator(model, solution).simulate(seed, max_depth);
}

} // namespace chainsolve
