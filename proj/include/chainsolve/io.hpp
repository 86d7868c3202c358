#pragma once

// Config parsing and the CSV / JSON / DOT artifacts written by the CLI.
// Every artifact carries a schema tag: CSV files start with a "# <tag>" line,
// JSON documents have a "schema" member, DOT files a leading comment.

#include "chainsolve/bench.hpp"
#include "chainsolve/model.hpp"
#include "chainsolve/network.hpp"
#include "chainsolve/solver.hpp"

#include "json.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace chainsolve {

inline constexpr std::string_view kConfigSchema = "chainsolve-config/1";
inline constexpr std::string_view kPriceSchema = "chainsolve-price/1";
inline constexpr std::string_view kPolicySchema = "chainsolve-policy/1";
inline constexpr std::string_view kCompareSchema = "chainsolve-compare/1";
inline constexpr std::string_view kBenchSchema = "chainsolve-bench/1";
inline constexpr std::string_view kNetworkSchema = "chainsolve-network/1";
inline constexpr std::string_view kDotSchema = "chainsolve-network-dot/1";

class ConfigError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

/// Shortest text that reads back to the same double.
inline std::string format_double(double x) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw IoError("not a number: '" + std::string(s) + "'");
  return v;
}

// ---------------------------------------------------------------------------
// Config

struct RunConfig {
  ModelConfig model;
  std::size_t m = 1000;
  Method method = Method::recursive;
  Variant variant = Variant::deterministic;
  double tol = 1e-8;
  std::size_t max_iter = 100000;
  std::vector<std::uint64_t> seeds{1};
  std::size_t max_depth = kDefaultMaxDepth;
  std::string out_dir = "out";
};

inline Method parse_method(std::string_view s) {
  if (s == "iterate") return Method::iterate;
  if (s == "recursive") return Method::recursive;
  throw ConfigError("unknown method '" + std::string(s) + "'");
}

inline Variant parse_variant(std::string_view s) {
  if (s == "det" || s == "deterministic") return Variant::deterministic;
  if (s == "stoch" || s == "stochastic") return Variant::stochastic;
  throw ConfigError("unknown variant '" + std::string(s) + "'");
}

inline RunConfig parse_config(const nlohmann::json& j) {
  try {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    if (j.value("schema", std::string()) != kConfigSchema)
      throw ConfigError("config schema must be \"" + std::string(kConfigSchema) + "\"");
    RunConfig cfg;
    const auto& model = j.at("model");
    const auto& cost = model.at("cost");
    cfg.model.cost_family = cost.at("family").get<std::string>();
    for (const auto& [key, val] : cost.items())
      if (key != "family") cfg.model.cost_params[key] = val.get<double>();
    cfg.model.delta = model.at("delta").get<double>();
    const auto& g = model.at("g");
    cfg.model.g_family = g.at("family").get<std::string>();
    cfg.model.beta = g.at("beta").get<double>();
    if (g.contains("gamma")) cfg.model.gamma = g.at("gamma").get<double>();

    if (j.contains("grid")) cfg.m = j["grid"].value("m", cfg.m);
    if (j.contains("solver")) {
      const auto& s = j["solver"];
      if (s.contains("method")) cfg.method = parse_method(s["method"].get<std::string>());
      if (s.contains("variant")) cfg.variant = parse_variant(s["variant"].get<std::string>());
      cfg.tol = s.value("tol", cfg.tol);
      cfg.max_iter = s.value("max_iter", cfg.max_iter);
    }
    if (j.contains("network")) {
      const auto& n = j["network"];
      if (n.contains("seeds")) cfg.seeds = n["seeds"].get<std::vector<std::uint64_t>>();
      cfg.max_depth = n.value("max_depth", cfg.max_depth);
    }
    if (j.contains("output")) cfg.out_dir = j["output"].value("dir", cfg.out_dir);
    if (cfg.m < 2) throw ConfigError("grid.m must be >= 2");
    if (!(cfg.tol > 0.0)) throw ConfigError("solver.tol must be positive");
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

inline RunConfig load_config(const std::string& path) {
  std::string text = read_text(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(j);
}

inline nlohmann::json model_to_json(const ModelSpec& model) {
  nlohmann::json cost{{"family", std::string(to_string(model.cost().family()))}};
  if (model.cost().family() == CostFamily::exp_affine) cost["a"] = model.cost().param();
  if (model.cost().family() == CostFamily::power) cost["theta"] = model.cost().param();
  nlohmann::json g{{"family", std::string(to_string(model.transaction().g_family()))},
                   {"beta", model.transaction().beta()}};
  if (model.transaction().g_family() == GFamily::power) g["gamma"] = model.transaction().gamma();
  return {{"cost", cost}, {"delta", model.delta()}, {"g", g}};
}

// ---------------------------------------------------------------------------
// CSV

struct CsvTable {
  std::string schema;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw IoError("missing column '" + std::string(name) + "'");
  }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

/// Parses "# <schema>" + header + rows, checking the schema tag prefix.
inline CsvTable parse_csv(const std::string& text, std::string_view expected_schema) {
  std::istringstream in(text);
  std::string line;
  CsvTable t;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) throw IoError("CSV lacks a schema line");
  t.schema = line.substr(2);
  if (t.schema.rfind(expected_schema, 0) != 0)
    throw IoError("CSV schema '" + t.schema + "' is not " + std::string(expected_schema));
  if (!std::getline(in, line)) throw IoError("CSV lacks a header");
  t.header = split_csv_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != t.header.size()) throw IoError("CSV row width mismatch: " + line);
    t.rows.push_back(std::move(cells));
  }
  return t;
}

inline std::string price_csv(const PriceFunction& p) {
  std::string out = "# " + std::string(kPriceSchema) + "\ns,p\n";
  for (std::size_t i = 0; i <= p.grid_size(); ++i)
    out += format_double(p.stage(i)) + "," + format_double(p[i]) + "\n";
  return out;
}

inline std::string policy_csv(const Policy& policy) {
  const bool det = policy.mode == Variant::deterministic;
  std::string out = "# " + std::string(kPolicySchema) + " variant=" + std::string(to_string(policy.mode)) + "\n";
  out += det ? "s,t_star,k_star\n" : "s,t_star,lambda_star\n";
  const std::size_t m = policy.size() - 1;
  for (std::size_t i = 0; i <= m; ++i) {
    out += format_double(static_cast<double>(i) / static_cast<double>(m)) + "," + format_double(policy.t_star[i]) + ",";
    out += det ? std::to_string(policy.k_star[i]) : format_double(policy.lambda_star[i]);
    out += "\n";
  }
  return out;
}

inline PriceFunction read_price_csv(const std::string& text) {
  CsvTable t = parse_csv(text, kPriceSchema);
  std::size_t col = t.column("p");
  std::vector<double> v;
  for (const auto& row : t.rows) v.push_back(parse_double(row[col]));
  return PriceFunction(std::move(v));
}

inline Policy read_policy_csv(const std::string& text) {
  CsvTable t = parse_csv(text, kPolicySchema);
  Policy policy;
  const bool det = t.header.size() == 3 && t.header[2] == "k_star";
  policy.mode = det ? Variant::deterministic : Variant::stochastic;
  std::size_t tc = t.column("t_star");
  std::size_t xc = t.column(det ? "k_star" : "lambda_star");
  const std::size_t m = t.rows.size() - 1;
  for (const auto& row : t.rows) {
    double ts = parse_double(row[tc]);
    policy.t_star.push_back(ts);
    policy.t_index.push_back(static_cast<std::size_t>(std::llround(ts * static_cast<double>(m))));
    if (det)
      policy.k_star.push_back(std::stoll(row[xc]));
    else
      policy.lambda_star.push_back(parse_double(row[xc]));
  }
  return policy;
}

struct CompareColumn {
  std::string label;
  PriceFunction price;
};

inline std::string compare_csv(const std::vector<CompareColumn>& columns) {
  std::string out = "# " + std::string(kCompareSchema) + "\ns";
  for (const auto& c : columns) out += "," + c.label;
  out += "\n";
  const PriceFunction& first = columns.front().price;
  for (std::size_t i = 0; i <= first.grid_size(); ++i) {
    out += format_double(first.stage(i));
    for (const auto& c : columns) out += "," + format_double(c.price[i]);
    out += "\n";
  }
  return out;
}

inline std::string bench_csv(const BenchReport& report) {
  std::string out = "# " + std::string(kBenchSchema) + "\ncase,method,median_seconds,iterations,sup_error,m,reference_m\n";
  for (const auto& r : report.records) {
    std::string method(to_string(r.method));
    if (r.timeout) method += "_timeout";
    out += r.case_name + "," + method + "," + format_double(r.median_seconds) + "," + std::to_string(r.iterations) +
           "," + format_double(r.sup_error) + "," + std::to_string(r.m) + "," + std::to_string(r.reference_m) + "\n";
  }
  return out;
}

inline BenchReport read_bench_csv(const std::string& text) {
  CsvTable t = parse_csv(text, kBenchSchema);
  BenchReport report;
  for (const auto& row : t.rows) {
    BenchRecord r;
    r.case_name = row[t.column("case")];
    std::string method = row[t.column("method")];
    r.timeout = method.size() > 8 && method.ends_with("_timeout");
    if (r.timeout) method.resize(method.size() - 8);
    r.method = parse_method(method);
    r.median_seconds = parse_double(row[t.column("median_seconds")]);
    r.iterations = std::stoull(row[t.column("iterations")]);
    r.sup_error = parse_double(row[t.column("sup_error")]);
    r.m = std::stoull(row[t.column("m")]);
    r.reference_m = std::stoull(row[t.column("reference_m")]);
    report.records.push_back(r);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Networks

inline nlohmann::ordered_json node_to_json(const FirmNode& n) {
  nlohmann::ordered_json j;
  j["stage"] = n.stage;
  j["in_house"] = n.in_house;
  j["t_subcontracted"] = n.t_subcontracted;
  j["lambda"] = n.lambda;
  j["realized_k"] = n.realized_k;
  j["value_added"] = n.value_added;
  j["price"] = n.price;
  auto children = nlohmann::ordered_json::array();
  for (const auto& c : n.children) children.push_back(node_to_json(c));
  j["children"] = std::move(children);
  return j;
}

inline std::string network_json(const ProductionNetwork& net, const ModelSpec& model) {
  nlohmann::ordered_json j;
  j["schema"] = kNetworkSchema;
  j["rng"] = net.rng;
  j["seed"] = net.seed;
  j["grid_size"] = net.grid_size;
  j["model"] = model_to_json(model);
  j["stats"] = {{"depth", net.stats.depth},
                {"n_firms", net.stats.n_firms},
                {"per_layer_counts", net.stats.per_layer_counts},
                {"value_added_min", net.stats.value_added_min},
                {"value_added_max", net.stats.value_added_max},
                {"value_added_mean", net.stats.value_added_mean}};
  j["root"] = node_to_json(net.root);
  return j.dump(1) + "\n";
}

inline FirmNode node_from_json(const nlohmann::json& j) {
  FirmNode n;
  n.stage = j.at("stage").get<double>();
  n.in_house = j.at("in_house").get<double>();
  n.t_subcontracted = j.at("t_subcontracted").get<double>();
  n.lambda = j.at("lambda").get<double>();
  n.realized_k = j.at("realized_k").get<std::int64_t>();
  n.value_added = j.at("value_added").get<double>();
  n.price = j.at("price").get<double>();
  for (const auto& c : j.at("children")) n.children.push_back(node_from_json(c));
  return n;
}

/// Reads a network document back; stats are recomputed from the tree.
inline ProductionNetwork read_network_json(const std::string& text) {
  try {
    auto j = nlohmann::json::parse(text);
    if (j.at("schema").get<std::string>() != kNetworkSchema) throw IoError("not a network document");
    ProductionNetwork net;
    net.rng = j.at("rng").get<std::string>();
    net.seed = j.at("seed").get<std::uint64_t>();
    net.grid_size = j.at("grid_size").get<std::size_t>();
    net.root = node_from_json(j.at("root"));
    net.stats = network_stats(net.root);
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed network JSON: ") + e.what());
  }
}

inline std::string network_dot(const ProductionNetwork& net) {
  std::string out = "// " + std::string(kDotSchema) + " seed=" + std::to_string(net.seed) + " rng=" + net.rng + "\n";
  out += "digraph network {\n  node [shape=circle, label=\"\"];\n";
  std::size_t next_id = 0;
  std::string edges;
  auto visit = [&](auto&& self, const FirmNode& n) -> std::size_t {
    std::size_t id = next_id++;
    std::string va = format_double(n.value_added);
    out += "  n" + std::to_string(id) + " [size=\"" + va + "\", stage=\"" + format_double(n.stage) +
           "\", k=\"" + std::to_string(n.realized_k) + "\"]; // value_added=" + va + "\n";
    for (const auto& c : n.children) {
      std::size_t cid = self(self, c);
      edges += "  n" + std::to_string(id) + " -> n" + std::to_string(cid) + ";\n";
    }
    return id;
  };
  visit(visit, net.root);
  out += edges + "}\n";
  return out;
}

} // namespace chainsolve
