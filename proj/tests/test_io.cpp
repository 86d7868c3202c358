#include "test_support.hpp"

#include "chainsolve/io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

namespace cs = chainsolve;
using namespace testing_support;

namespace {

nlohmann::json minimal_config() {
  return nlohmann::json::parse(R"({
    "schema": "chainsolve-config/1",
    "model": {"cost": {"family": "exp_affine", "a": 10}, "delta": 10, "g": {"family": "linear", "beta": 50}}
  })");
}

} // namespace

TEST(FormatDouble, RoundTripsExactly) {
  for (double x : {0.0, 1.0, 0.1, 1.0 / 3.0, 22025.465794806718, 1e-300, -2.5, 6.02214076e23}) {
    EXPECT_EQ(cs::parse_double(cs::format_double(x)), x);
  }
  EXPECT_THROW(cs::parse_double("1.5x"), cs::IoError);
  EXPECT_THROW(cs::parse_double(""), cs::IoError);
}

TEST(Config, DefaultsAndOverrides) {
  auto cfg = cs::parse_config(minimal_config());
  EXPECT_EQ(cfg.m, 1000u);
  EXPECT_EQ(cfg.method, cs::Method::recursive);
  EXPECT_EQ(cfg.variant, cs::Variant::deterministic);
  EXPECT_EQ(cfg.seeds, std::vector<std::uint64_t>{1});
  auto model = cs::make_model(cfg.model);
  EXPECT_DOUBLE_EQ(model.delta(), 10.0);

  auto j = minimal_config();
  j["grid"]["m"] = 64;
  j["solver"] = {{"method", "iterate"}, {"variant", "stoch"}, {"tol", 1e-6}, {"max_iter", 7}};
  j["network"] = {{"seeds", {4, 5}}, {"max_depth", 30}};
  j["output"] = {{"dir", "somewhere"}};
  cfg = cs::parse_config(j);
  EXPECT_EQ(cfg.m, 64u);
  EXPECT_EQ(cfg.method, cs::Method::iterate);
  EXPECT_EQ(cfg.variant, cs::Variant::stochastic);
  EXPECT_EQ(cfg.tol, 1e-6);
  EXPECT_EQ(cfg.max_iter, 7u);
  EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{4, 5}));
  EXPECT_EQ(cfg.max_depth, 30u);
  EXPECT_EQ(cfg.out_dir, "somewhere");
}

TEST(Config, Errors) {
  auto j = minimal_config();
  j.erase("schema");
  EXPECT_THROW(cs::parse_config(j), cs::ConfigError);
  j = minimal_config();
  j["model"].erase("delta");
  EXPECT_THROW(cs::parse_config(j), cs::ConfigError);
  j = minimal_config();
  j["solver"] = {{"method", "newton"}};
  EXPECT_THROW(cs::parse_config(j), cs::ConfigError);
  j = minimal_config();
  j["grid"]["m"] = 1;
  EXPECT_THROW(cs::parse_config(j), cs::ConfigError);
  j = minimal_config();
  j["model"]["delta"] = "ten";
  EXPECT_THROW(cs::parse_config(j), cs::ConfigError);
  EXPECT_THROW(cs::load_config("/nonexistent/config.json"), cs::IoError);
}

TEST(Config, ShippedConfigsLoad) {
  for (const char* name : {"figure1", "figure4a", "figure4b", "figure4c", "figure4d", "degenerate"}) {
    auto cfg = cs::load_config(std::string(CHAINSOLVE_CONFIGS) + "/" + name + ".json");
    EXPECT_NO_THROW(cs::make_model(cfg.model)) << name;
  }
}

TEST(PriceCsv, RoundTrip) {
  auto sol = cs::solve_recursive(figure1(), 50, cs::Variant::deterministic);
  std::string text = cs::price_csv(sol.price);
  EXPECT_EQ(text.rfind("# chainsolve-price/1\ns,p\n", 0), 0u);
  auto back = cs::read_price_csv(text);
  EXPECT_EQ(to_vector(back), to_vector(sol.price));
}

TEST(PolicyCsv, RoundTripBothVariants) {
  auto det = cs::solve_recursive(figure1(), 40, cs::Variant::deterministic);
  auto back = cs::read_policy_csv(cs::policy_csv(det.policy));
  EXPECT_EQ(back.mode, cs::Variant::deterministic);
  EXPECT_EQ(back.t_star, det.policy.t_star);
  EXPECT_EQ(back.t_index, det.policy.t_index);
  EXPECT_EQ(back.k_star, det.policy.k_star);

  auto sto = cs::solve_recursive(figure4a(), 30, cs::Variant::stochastic);
  auto back2 = cs::read_policy_csv(cs::policy_csv(sto.policy));
  EXPECT_EQ(back2.mode, cs::Variant::stochastic);
  EXPECT_EQ(back2.lambda_star, sto.policy.lambda_star);
}

TEST(Csv, SchemaAndShapeChecks) {
  EXPECT_THROW(cs::read_price_csv("s,p\n0,0\n"), cs::IoError);
  EXPECT_THROW(cs::read_price_csv("# chainsolve-bench/1\ns,p\n0,0\n"), cs::IoError);
  EXPECT_THROW(cs::read_price_csv("# chainsolve-price/1\ns,p\n0\n"), cs::IoError);
  EXPECT_THROW(cs::read_price_csv("# chainsolve-price/1\ns,q\n0,0\n"), cs::IoError);
}

TEST(CompareCsv, ColumnsInOrder) {
  cs::PriceFunction a({0.0, 1.0, 2.0}), b({0.0, 1.5, 2.5});
  std::string text = cs::compare_csv({{"delta=1.05", a}, {"delta=1.1", b}});
  auto t = cs::parse_csv(text, cs::kCompareSchema);
  EXPECT_EQ(t.header, (std::vector<std::string>{"s", "delta=1.05", "delta=1.1"}));
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_EQ(t.rows[1][2], "1.5");
}

TEST(BenchCsv, RoundTripWithTimeout) {
  cs::BenchReport report;
  cs::BenchRecord a;
  a.case_name = "model1_delta1.1";
  a.method = cs::Method::iterate;
  a.median_seconds = 0.125;
  a.iterations = 9;
  a.sup_error = 3.25;
  a.m = 500;
  a.reference_m = 8000;
  cs::BenchRecord b = a;
  b.method = cs::Method::recursive;
  b.iterations = 0;
  b.timeout = true;
  report.records = {a, b};
  auto back = cs::read_bench_csv(cs::bench_csv(report));
  ASSERT_EQ(back.records.size(), 2u);
  EXPECT_EQ(back.records[0].case_name, a.case_name);
  EXPECT_EQ(back.records[0].method, cs::Method::iterate);
  EXPECT_FALSE(back.records[0].timeout);
  EXPECT_EQ(back.records[0].median_seconds, 0.125);
  EXPECT_EQ(back.records[0].iterations, 9u);
  EXPECT_EQ(back.records[1].method, cs::Method::recursive);
  EXPECT_TRUE(back.records[1].timeout);
}

TEST(NetworkJson, RoundTripAndByteStable) {
  auto model = exp_linear(1.0, 1.1, 0.01);
  auto sol = cs::solve_recursive(model, 60, cs::Variant::stochastic);
  auto net = cs::simulate_network(model, sol, 4);
  std::string a = cs::network_json(net, model);
  EXPECT_EQ(a, cs::network_json(cs::simulate_network(model, sol, 4), model));
  auto back = cs::read_network_json(a);
  EXPECT_EQ(back.seed, 4u);
  EXPECT_EQ(back.rng, net.rng);
  EXPECT_EQ(back.stats.n_firms, net.stats.n_firms);
  EXPECT_EQ(back.root.value_added, net.root.value_added);
  EXPECT_EQ(cs::network_json(back, model), a);
  EXPECT_THROW(cs::read_network_json("{\"schema\": \"other\"}"), cs::IoError);
  EXPECT_THROW(cs::read_network_json("not json"), cs::IoError);
}

TEST(NetworkDot, OneNodePerFirm) {
  auto model = exp_linear(1.0, 1.1, 0.01);
  auto sol = cs::solve_recursive(model, 60, cs::Variant::stochastic);
  auto net = cs::simulate_network(model, sol, 2);
  std::string dot = cs::network_dot(net);
  EXPECT_EQ(dot.rfind("// chainsolve-network-dot/1", 0), 0u);
  std::size_t nodes = 0, edges = 0;
  for (std::size_t pos = 0; (pos = dot.find("// value_added=", pos)) != std::string::npos; ++pos) ++nodes;
  for (std::size_t pos = 0; (pos = dot.find(" -> ", pos)) != std::string::npos; ++pos) ++edges;
  EXPECT_EQ(nodes, net.stats.n_firms);
  EXPECT_EQ(edges, net.stats.n_firms - 1);
}
