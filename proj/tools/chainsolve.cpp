// chainsolve: equilibrium prices, comparative statics, simulated networks and
// solver benchmarks for the multi-partner production chain.
//
// Exit codes: 0 success, 1 config/validation, 2 solver failure, 3 I/O.

#include "chainsolve/chainsolve.hpp"
#include "chainsolve/io.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace cs = chainsolve;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kConfig = 1, kSolver = 2, kIo = 3 };

struct Overrides {
  std::string config;
  std::optional<std::string> method;
  std::optional<std::string> variant;
  std::optional<std::size_t> m;
  std::optional<std::string> out;
  std::optional<double> tol;
  std::optional<std::size_t> max_iter;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON run configuration")->required();
  cmd->add_option("--method", o.method, "iterate | recursive");
  cmd->add_option("--variant", o.variant, "det | stoch");
  cmd->add_option("--m", o.m, "grid size");
  cmd->add_option("--out", o.out, "output directory (or file for compare)");
  cmd->add_option("--tol", o.tol, "step-size tolerance of the iterative method");
  cmd->add_option("--max-iter", o.max_iter, "iteration cap of the iterative method");
}

cs::RunConfig resolve(const Overrides& o) {
  cs::RunConfig cfg = cs::load_config(o.config);
  if (o.method) cfg.method = cs::parse_method(*o.method);
  if (o.variant) cfg.variant = cs::parse_variant(*o.variant);
  if (o.m) {
    if (*o.m < 2) throw cs::ConfigError("--m must be >= 2");
    cfg.m = *o.m;
  }
  if (o.out) cfg.out_dir = *o.out;
  if (o.tol) cfg.tol = *o.tol;
  if (o.max_iter) cfg.max_iter = *o.max_iter;
  return cfg;
}

cs::SolverOptions solver_options(const cs::RunConfig& cfg, unsigned threads) {
  cs::SolverOptions so;
  so.tol = cfg.tol;
  so.max_iter = cfg.max_iter;
  so.op.threads = threads;
  return so;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw cs::IoError("cannot create " + dir + ": " + ec.message());
}

void print_warnings(const cs::ModelSpec& model) {
  for (const auto& w : model.warnings()) std::cerr << "warning: " << w << "\n";
}

int cmd_solve(const Overrides& o, bool allow_partial, unsigned threads) {
  cs::RunConfig cfg = resolve(o);
  cs::ModelSpec model = cs::make_model(cfg.model);
  print_warnings(model);
  cs::Solution sol;
  int code = kOk;
  try {
    sol = cs::solve(model, cfg.m, cfg.method, cfg.variant, solver_options(cfg, threads));
  } catch (const cs::MaxIterationsExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (!allow_partial) return kSolver;
    sol = e.partial();
    code = kSolver;
  }
  ensure_dir(cfg.out_dir);
  cs::write_text(cfg.out_dir + "/price.csv", cs::price_csv(sol.price));
  cs::write_text(cfg.out_dir + "/policy.csv", cs::policy_csv(sol.policy));
  std::cout << "method=" << cs::to_string(sol.method) << " variant=" << cs::to_string(sol.variant)
            << " m=" << cfg.m << " iterations=" << sol.iterations << " residual=" << cs::format_double(sol.residual)
            << " p(1)=" << cs::format_double(sol.price[cfg.m]) << "\n";
  return allow_partial ? kOk : code;
}

struct Variation {
  std::string parameter;
  double value;
  std::string text; // as given on the command line
};

std::vector<Variation> parse_variations(const std::vector<std::string>& specs) {
  std::vector<Variation> out;
  for (const auto& spec : specs) {
    auto eq = spec.find('=');
    if (eq == std::string::npos) throw cs::ConfigError("--vary expects name=v1,v2,...: " + spec);
    std::string name = spec.substr(0, eq);
    if (name != "delta" && name != "beta") throw cs::ConfigError("--vary supports delta and beta, got " + name);
    std::stringstream ss(spec.substr(eq + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        out.push_back({name, cs::parse_double(item), item});
      } catch (const cs::IoError&) {
        throw cs::ConfigError("bad --vary value: " + item);
      }
    }
  }
  return out;
}

int cmd_compare(const Overrides& o, const std::vector<std::string>& vary, unsigned threads) {
  cs::RunConfig cfg = resolve(o);
  cs::ModelSpec base = cs::make_model(cfg.model);
  print_warnings(base);
  std::vector<Variation> variations = parse_variations(vary);
  std::vector<cs::ModelSpec> models;
  for (const auto& v : variations)
    models.push_back(v.parameter == "delta" ? base.with_delta(v.value) : base.with_beta(v.value));

  cs::SolverOptions so = solver_options(cfg, threads);
  so.compute_residual = false;
  std::vector<cs::CompareColumn> columns;
  columns.push_back({"baseline", cs::solve(base, cfg.m, cfg.method, cfg.variant, so).price});
  for (std::size_t i = 0; i < models.size(); ++i) {
    std::string label = variations[i].parameter + "=" + variations[i].text;
    columns.push_back({label, cs::solve(models[i], cfg.m, cfg.method, cfg.variant, so).price});
  }

  const cs::PriceFunction& p0 = columns.front().price;
  for (std::size_t i = 0; i < variations.size(); ++i) {
    const auto& v = variations[i];
    double base_value = v.parameter == "delta" ? base.delta() : base.transaction().beta();
    const cs::PriceFunction& p = columns[i + 1].price;
    double worst = 0.0; // largest violation of the expected ordering
    for (std::size_t k = 0; k <= cfg.m; ++k) {
      double diff = p[k] - p0[k];
      if (v.value > base_value) worst = std::max(worst, -diff);
      else if (v.value < base_value) worst = std::max(worst, diff);
      else worst = std::max(worst, std::abs(diff));
    }
    const char* expect = v.value > base_value ? ">=" : (v.value < base_value ? "<=" : "==");
    std::cout << "ordering " << columns[i + 1].label << " " << expect << " baseline: "
              << (worst <= 1e-9 ? "ok" : "VIOLATED") << " (max violation " << cs::format_double(worst) << ")\n";
  }
  std::string out = o.out ? *o.out : cfg.out_dir + "/compare.csv";
  fs::path parent = fs::path(out).parent_path();
  if (!parent.empty()) ensure_dir(parent.string());
  cs::write_text(out, cs::compare_csv(columns));
  return kOk;
}

int cmd_network(const Overrides& o, const std::optional<std::string>& seeds_flag, unsigned threads) {
  cs::RunConfig cfg = resolve(o);
  if (seeds_flag) {
    cfg.seeds.clear();
    std::stringstream ss(*seeds_flag);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        cfg.seeds.push_back(std::stoull(item));
      } catch (const std::exception&) {
        throw cs::ConfigError("bad seed: " + item);
      }
    }
  }
  if (cfg.seeds.empty()) throw cs::ConfigError("no seeds given");
  cs::ModelSpec model = cs::make_model(cfg.model);
  print_warnings(model);
  cs::SolverOptions so = solver_options(cfg, threads);
  so.compute_residual = false;
  cs::Solution sol = cs::solve(model, cfg.m, cfg.method, cs::Variant::stochastic, so);
  cs::OperatorOptions op;
  op.threads = threads;
  cs::NetworkSimulator sim(model, sol, op);
  ensure_dir(cfg.out_dir);
  for (std::uint64_t seed : cfg.seeds) {
    cs::ProductionNetwork net = sim.simulate(seed, cfg.max_depth);
    std::string stem = cfg.out_dir + "/network_seed" + std::to_string(seed);
    cs::write_text(stem + ".json", cs::network_json(net, model));
    cs::write_text(stem + ".dot", cs::network_dot(net));
    std::cout << "seed=" << seed << " depth=" << net.stats.depth << " firms=" << net.stats.n_firms << "\n";
  }
  return kOk;
}

int cmd_bench(const std::string& suite, int repeats, const std::string& out, cs::BenchOptions options) {
  std::vector<cs::BenchCase> cases;
  if (suite == "desk") cases = cs::paper_suite(cs::kDeskGrid, cs::kDeskReferenceGrid);
  else if (suite == "paper") cases = cs::paper_suite(cs::kFullGrid, cs::kFullReferenceGrid);
  else throw cs::ConfigError("unknown suite '" + suite + "'");
  cs::BenchReport report = cs::run_benchmark(cases, repeats, options);
  fs::path parent = fs::path(out).parent_path();
  if (!parent.empty()) ensure_dir(parent.string());
  cs::write_text(out, cs::bench_csv(report));
  for (const auto& r : report.records)
    std::cout << r.case_name << " " << cs::to_string(r.method) << (r.timeout ? " TIMEOUT" : "")
              << " median=" << r.median_seconds << "s iterations=" << r.iterations << " sup_error=" << r.sup_error
              << "\n";
  return kOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equilibrium price solver for production chains with multiple upstream partners"};
  app.require_subcommand(1);

  Overrides solve_o, compare_o, network_o;
  bool allow_partial = false;
  CLI::App* solve = app.add_subcommand("solve", "solve for the equilibrium price; writes price.csv and policy.csv");
  add_common(solve, solve_o);
  solve->add_flag("--allow-partial", allow_partial, "write the last iterate when the iteration cap is hit");

  std::vector<std::string> vary;
  CLI::App* compare = app.add_subcommand("compare", "comparative statics over delta / beta variants");
  add_common(compare, compare_o);
  compare->add_option("--vary", vary, "name=v1,v2 with name in {delta, beta}")->required();

  std::optional<std::string> seeds;
  CLI::App* network = app.add_subcommand("network", "simulate firm networks from the stochastic equilibrium");
  add_common(network, network_o);
  network->add_option("--seeds", seeds, "comma-separated seeds");

  std::string suite = "desk";
  int repeats = 5;
  std::string bench_out = "bench.csv";
  cs::BenchOptions bench_options;
  bool concurrent = false;
  CLI::App* bench = app.add_subcommand("bench", "time the iterative and recursive solvers");
  bench->add_option("--suite", suite, "paper (m=1000, reference 50000) | desk (m=500, reference 8000)");
  bench->add_option("--repeats", repeats, "timed repeats after one warm-up")->check(CLI::PositiveNumber);
  bench->add_option("--out", bench_out, "CSV output path");
  bench->add_option("--tol", bench_options.tol, "iterative step-size tolerance");
  bench->add_option("--max-iter", bench_options.max_iter, "iterative iteration cap");
  bench->add_option("--max-seconds", bench_options.max_seconds, "per-solve time budget before a timeout row");
  bench->add_flag("--concurrent", concurrent, "run cases concurrently (timings become unreliable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  const unsigned threads = cs::threads_from_env(1);
  try {
    if (*solve) return cmd_solve(solve_o, allow_partial, threads);
    if (*compare) return cmd_compare(compare_o, vary, threads);
    if (*network) return cmd_network(network_o, seeds, threads);
    if (*bench) {
      bench_options.threads = threads;
      bench_options.concurrent_cases = concurrent;
      return cmd_bench(suite, repeats, bench_out, bench_options);
    }
  } catch (const cs::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kIo;
  } catch (const cs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const cs::UnknownFamily& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const cs::ParameterOutOfRange& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const cs::AssumptionViolated& e) {
    std::cerr << "config error: " << e.what() << " (at s=" << e.point() << ")\n";
    return kConfig;
  } catch (const cs::Error& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kSolver;
  }
  return kOk;
}
