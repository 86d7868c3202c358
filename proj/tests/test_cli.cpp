// Runs the built chainsolve binary end to end.

#include "chainsolve/io.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

namespace cs = chainsolve;
namespace fs = std::filesystem;

namespace {

const std::string kCli = CHAINSOLVE_CLI;
const std::string kConfigs = CHAINSOLVE_CONFIGS;

class Cli : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("chainsolve_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args) const {
    std::string cmd = kCli + " " + args + " > " + (dir_ / "stdout.txt").string() + " 2> " +
                      (dir_ / "stderr.txt").string();
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string out(const std::string& name) const { return cs::read_text((dir_ / name).string()); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  static std::string config(const std::string& name) { return kConfigs + "/" + name + ".json"; }

  fs::path dir_;
};

} // namespace

TEST_F(Cli, SolveWritesPriceAndPolicy) {
  ASSERT_EQ(run("solve --config " + config("figure1") + " --m 2 --out " + path("a")), 0);
  auto table = cs::parse_csv(out("a/price.csv"), cs::kPriceSchema);
  EXPECT_EQ(table.header, (std::vector<std::string>{"s", "p"}));
  EXPECT_EQ(table.rows.size(), 3u);
  auto policy = cs::parse_csv(out("a/policy.csv"), cs::kPolicySchema);
  EXPECT_EQ(policy.header, (std::vector<std::string>{"s", "t_star", "k_star"}));
  EXPECT_NE(out("stdout.txt").find("p(1)="), std::string::npos);
}

TEST_F(Cli, SolveIsByteIdenticalOnRerun) {
  ASSERT_EQ(run("solve --config " + config("figure1") + " --m 200 --out " + path("a")), 0);
  ASSERT_EQ(run("solve --config " + config("figure1") + " --m 200 --out " + path("b")), 0);
  EXPECT_EQ(out("a/price.csv"), out("b/price.csv"));
  EXPECT_EQ(out("a/policy.csv"), out("b/policy.csv"));
}

TEST_F(Cli, MethodsAgreeThroughCli) {
  ASSERT_EQ(run("solve --config " + config("figure1") + " --m 100 --method iterate --out " + path("it")), 0);
  ASSERT_EQ(run("solve --config " + config("figure1") + " --m 100 --method recursive --out " + path("rec")), 0);
  auto a = cs::read_price_csv(out("it/price.csv"));
  auto b = cs::read_price_csv(out("rec/price.csv"));
  EXPECT_LE(cs::sup_distance(a, b), 1e-6);
}

TEST_F(Cli, StochasticPolicyHasEffortColumn) {
  ASSERT_EQ(run("solve --config " + config("figure4a") + " --m 20 --out " + path("s")), 0);
  auto policy = cs::parse_csv(out("s/policy.csv"), cs::kPolicySchema);
  EXPECT_EQ(policy.header.back(), "lambda_star");
  EXPECT_NE(out("stderr.txt").find("warning"), std::string::npos);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("solve --config " + path("missing.json")), 3);
  cs::write_text(path("bad.json"), "{\"schema\": \"chainsolve-config/1\", \"model\": {}}");
  EXPECT_EQ(run("solve --config " + path("bad.json")), 1);
  cs::write_text(path("delta.json"), R"({"schema": "chainsolve-config/1",
    "model": {"cost": {"family": "exp_affine", "a": 1}, "delta": 0.5, "g": {"family": "linear", "beta": 1}}})");
  EXPECT_EQ(run("solve --config " + path("delta.json")), 1);
  EXPECT_EQ(run("solve --config " + config("figure1") + " --method newton"), 1);
  EXPECT_EQ(run("solve"), 1);
  EXPECT_EQ(run("--help"), 0);
}

TEST_F(Cli, IterationCapIsSolverError) {
  std::string base = "solve --config " + config("figure1") + " --m 50 --method iterate --max-iter 1 --out ";
  EXPECT_EQ(run(base + path("x")), 2);
  EXPECT_FALSE(fs::exists(path("x/price.csv")));
  EXPECT_EQ(run(base + path("y") + " --allow-partial"), 0);
  EXPECT_TRUE(fs::exists(path("y/price.csv")));
}

TEST_F(Cli, CompareReportsOrdering) {
  ASSERT_EQ(run("compare --config " + config("figure4a") + " --variant det --m 60 --vary delta=1.1 --vary beta=0.0001 --out " +
                path("cmp.csv")),
            0);
  std::string stdout_text = out("stdout.txt");
  EXPECT_NE(stdout_text.find("ordering delta=1.1 >= baseline: ok"), std::string::npos) << stdout_text;
  EXPECT_NE(stdout_text.find("ordering beta=0.0001 <= baseline: ok"), std::string::npos) << stdout_text;
  auto table = cs::parse_csv(out("cmp.csv"), cs::kCompareSchema);
  EXPECT_EQ(table.header, (std::vector<std::string>{"s", "baseline", "delta=1.1", "beta=0.0001"}));
  EXPECT_EQ(table.rows.size(), 61u);
  EXPECT_EQ(run("compare --config " + config("figure4a") + " --vary gamma=2"), 1);
}

TEST_F(Cli, NetworkWritesJsonAndDotPerSeed) {
  ASSERT_EQ(run("network --config " + config("figure4a") + " --m 100 --seeds 1,2 --out " + path("n")), 0);
  for (const char* seed : {"1", "2"}) {
    std::string stem = std::string("n/network_seed") + seed;
    auto net = cs::read_network_json(out(stem + ".json"));
    EXPECT_EQ(std::to_string(net.seed), seed);
    EXPECT_GE(net.stats.n_firms, 1u);
    EXPECT_EQ(out(stem + ".dot").rfind("// chainsolve-network-dot/1", 0), 0u);
  }
  std::string first = out("n/network_seed1.json");
  ASSERT_EQ(run("network --config " + config("figure4a") + " --m 100 --seeds 1 --out " + path("n")), 0);
  EXPECT_EQ(out("n/network_seed1.json"), first);
}

TEST_F(Cli, DegenerateNetworkIsSingleFirm) {
  ASSERT_EQ(run("network --config " + config("degenerate") + " --seeds 1 --out " + path("d")), 0);
  auto net = cs::read_network_json(out("d/network_seed1.json"));
  EXPECT_EQ(net.stats.n_firms, 1u);
}

TEST_F(Cli, ThreadCountLeavesOutputUnchanged) {
  ASSERT_EQ(run("solve --config " + config("figure1") + " --m 300 --out " + path("one")), 0);
  std::string cmd = "CHAINSOLVE_THREADS=3 " + kCli + " solve --config " + config("figure1") + " --m 300 --out " +
                    path("three") + " > /dev/null";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_EQ(out("one/price.csv"), out("three/price.csv"));
}

TEST_F(Cli, BenchRejectsUnknownSuite) {
  EXPECT_EQ(run("bench --suite nope --out " + path("b.csv")), 1);
  EXPECT_EQ(run("bench --repeats 0"), 1);
}
