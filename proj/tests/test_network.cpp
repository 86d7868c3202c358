#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>

namespace cs = chainsolve;
using namespace testing_support;

namespace {

const cs::Solution& figure4a_solution() {
  static const cs::Solution sol = cs::solve_recursive(figure4a(), 500, cs::Variant::stochastic);
  return sol;
}

void visit(const cs::FirmNode& node, const std::function<void(const cs::FirmNode&)>& fn) {
  fn(node);
  for (const auto& child : node.children) visit(child, fn);
}

bool same_tree(const cs::FirmNode& a, const cs::FirmNode& b) {
  if (a.stage != b.stage || a.in_house != b.in_house || a.t_subcontracted != b.t_subcontracted ||
      a.lambda != b.lambda || a.realized_k != b.realized_k || a.value_added != b.value_added ||
      a.price != b.price || a.children.size() != b.children.size())
    return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!same_tree(a.children[i], b.children[i])) return false;
  return true;
}

double mean_depth(const cs::ModelSpec& model, std::uint64_t seeds) {
  auto sol = cs::solve_recursive(model, 500, cs::Variant::stochastic);
  cs::NetworkSimulator sim(model, sol);
  double total = 0.0;
  for (std::uint64_t seed = 1; seed <= seeds; ++seed) total += static_cast<double>(sim.simulate(seed).stats.depth);
  return total / static_cast<double>(seeds);
}

} // namespace

TEST(SamplePartnerCount, ZeroEffortIsOne) {
  auto rng = cs::CounterRng::from_seed(5);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(cs::sample_partner_count(0.0, rng), 1);
}

TEST(SamplePartnerCount, FrequenciesMatchPmf) {
  auto rng = cs::CounterRng::from_seed(2024);
  const int n = 1000000;
  std::vector<int> counts(8, 0);
  for (int i = 0; i < n; ++i) {
    auto k = cs::sample_partner_count(2.5, rng);
    ASSERT_GE(k, 1);
    if (k < 8) ++counts[static_cast<std::size_t>(k)];
  }
  const double exact[] = {0.082, 0.205, 0.257, 0.214, 0.134};
  for (int k = 1; k <= 5; ++k) {
    double freq = static_cast<double>(counts[static_cast<std::size_t>(k)]) / n;
    EXPECT_NEAR(freq, exact[k - 1], 0.01) << "k=" << k;
    EXPECT_NEAR(freq, cs::poisson_pmf(k, 2.5), 0.003) << "k=" << k;
  }
}

TEST(CounterRng, SeededStreamsAreReproducible) {
  auto a = cs::CounterRng::from_seed(9);
  auto b = cs::CounterRng::from_seed(9);
  auto c = cs::CounterRng::from_seed(10);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    auto x = a.next();
    EXPECT_EQ(x, b.next());
    differs = differs || x != c.next();
  }
  EXPECT_TRUE(differs);
  for (int i = 0; i < 1000; ++i) {
    double u = a.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Network, ProhibitiveDeltaGivesSingleFirm) {
  auto model = exp_linear(1.0, 1e6, 1.0);
  auto sol = cs::solve_recursive(model, 100, cs::Variant::stochastic);
  auto net = cs::simulate_network(model, sol, 1);
  EXPECT_TRUE(net.root.children.empty());
  EXPECT_EQ(net.stats.n_firms, 1u);
  EXPECT_EQ(net.stats.depth, 0u);
  EXPECT_DOUBLE_EQ(net.root.value_added, model.c_at_one());
}

TEST(Network, RequiresStochasticSolution) {
  auto model = figure4a();
  auto sol = cs::solve_recursive(model, 50, cs::Variant::deterministic);
  EXPECT_THROW(cs::NetworkSimulator(model, sol), cs::DomainError);
}

TEST(Network, Figure4aIsMultiLayerAndAsymmetric) {
  auto model = figure4a();
  auto net = cs::simulate_network(model, figure4a_solution(), 1);
  EXPECT_GE(net.stats.depth, 2u);
  EXPECT_GT(net.stats.n_firms, 1u);
  EXPECT_LT(net.stats.value_added_min, net.stats.value_added_max);
  EXPECT_EQ(net.rng, "splitmix64-counter/1");
}

TEST(Network, NodeInvariantsAndAccounting) {
  auto model = figure4a();
  const auto& sol = figure4a_solution();
  cs::NetworkSimulator sim(model, sol);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto net = sim.simulate(seed);
    visit(net.root, [&](const cs::FirmNode& n) {
      EXPECT_NEAR(n.in_house + n.t_subcontracted, n.stage, 1e-12);
      EXPECT_GT(n.in_house, 0.0);
      EXPECT_GE(n.realized_k, 1);
      EXPECT_GE(n.lambda, 0.0);
      if (n.children.empty()) {
        EXPECT_EQ(n.t_subcontracted, 0.0);
      } else {
        EXPECT_EQ(n.children.size(), static_cast<std::size_t>(n.realized_k));
        for (const auto& c : n.children)
          EXPECT_NEAR(c.stage, n.t_subcontracted / static_cast<double>(n.realized_k), 1e-15);
      }
      EXPECT_NEAR(n.value_added, model.c(n.in_house) + model.g(n.realized_k), 1e-12);
      double expected =
          model.c(n.in_house) + brute_expected(model, to_vector(sol.price), n.t_subcontracted, n.lambda);
      EXPECT_LE(std::abs(n.price - expected), 1e-6) << "stage " << n.stage;
    });
  }
}

TEST(Network, SeedDeterminism) {
  auto model = figure4a();
  cs::NetworkSimulator sim(model, figure4a_solution());
  auto a = sim.simulate(7), b = sim.simulate(7), c = sim.simulate(8);
  EXPECT_TRUE(same_tree(a.root, b.root));
  EXPECT_EQ(a.stats.n_firms, b.stats.n_firms);
  EXPECT_FALSE(same_tree(a.root, c.root));
}

TEST(Network, StatsPartitionFirms) {
  auto net = cs::simulate_network(figure4a(), figure4a_solution(), 3);
  std::size_t total = 0;
  for (auto n : net.stats.per_layer_counts) total += n;
  EXPECT_EQ(total, net.stats.n_firms);
  EXPECT_EQ(net.stats.per_layer_counts.size(), net.stats.depth + 1);
  EXPECT_EQ(net.stats.per_layer_counts[0], 1u);
  EXPECT_EQ(net.stats.value_added.size(), net.stats.n_firms);
  EXPECT_EQ(net.stats.value_added.front(), net.root.value_added);
  std::size_t visited = 0;
  visit(net.root, [&](const cs::FirmNode&) { ++visited; });
  EXPECT_EQ(visited, net.stats.n_firms);
}

TEST(Network, DepthLimit) {
  EXPECT_THROW(cs::simulate_network(figure4a(), figure4a_solution(), 1, 0), cs::DepthExceeded);
}

TEST(Network, HigherProportionalCostShortensChains) {
  auto base = figure4a();
  EXPECT_LE(mean_depth(base.with_delta(1.1), 30), mean_depth(base, 30));
}

TEST(Network, HigherAdditiveCostReducesWidth) {
  auto base = figure4a();
  auto cheap = base.with_beta(0.0001);
  auto sol = cs::solve_recursive(cheap, 500, cs::Variant::stochastic);
  double mean_cheap = 0.0, mean_base = 0.0;
  cs::NetworkSimulator sim_cheap(cheap, sol), sim_base(base, figure4a_solution());
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    mean_cheap += static_cast<double>(sim_cheap.simulate(seed).stats.n_firms);
    mean_base += static_cast<double>(sim_base.simulate(seed).stats.n_firms);
  }
  EXPECT_GE(mean_cheap, mean_base);
}
