#pragma once

// Wall-clock and accuracy comparison of the iterative and recursive solvers.

#include "chainsolve/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace chainsolve {

struct BenchCase {
  std::string name;
  ModelSpec model;
  std::size_t m = 500;
  std::size_t reference_m = 8000;
};

struct BenchRecord {
  std::string case_name;
  Method method = Method::recursive;
  double median_seconds = 0.0;
  std::size_t iterations = 0;
  double sup_error = 0.0;
  std::size_t m = 0;
  std::size_t reference_m = 0;
  bool timeout = false;
};

struct BenchReport {
  std::vector<BenchRecord> records;

  const BenchRecord* find(const std::string& case_name, Method method) const {
    for (const auto& r : records)
      if (r.case_name == case_name && r.method == method) return &r;
    return nullptr;
  }
};

struct BenchOptions {
  double tol = 1e-8;
  std::size_t max_iter = 100000;
  double max_seconds = 600.0;
  unsigned threads = 1;
  /// Run cases in parallel; only errors stay meaningful.
  bool concurrent_cases = false;
};

inline constexpr std::size_t kDeskGrid = 500;
inline constexpr std::size_t kDeskReferenceGrid = 8000;
inline constexpr std::size_t kFullGrid = 1000;
inline constexpr std::size_t kFullReferenceGrid = 50000;

/// The five (c, g) pairs of the timing comparison, first at delta = 1.1 and
/// then at delta = 1.01.
inline std::vector<BenchCase> paper_suite(std::size_t m = kDeskGrid, std::size_t reference_m = kDeskReferenceGrid) {
  if (reference_m < 8 * m) throw DomainError("reference grid must be at least 8x the bench grid");
  struct Pair {
    CostSpec cost;
    double beta;
  };
  const Pair pairs[] = {
      {CostSpec(CostFamily::exp_affine, 10.0), 1.0},
      {CostSpec(CostFamily::exp_affine, 1.0), 0.01},
      {CostSpec(CostFamily::exp_square), 0.01},
      {CostSpec(CostFamily::poly_affine), 0.01},
      {CostSpec(CostFamily::exp_plus_square), 0.05},
  };
  std::vector<BenchCase> cases;
  int index = 1;
  for (double delta : {1.1, 1.01}) {
    for (const Pair& p : pairs) {
      ModelSpec model = make_model(p.cost, TransactionSpec(delta, GFamily::linear, p.beta));
      cases.push_back(BenchCase{"model" + std::to_string(index) + "_delta" + (delta == 1.1 ? "1.1" : "1.01"),
                                model, m, reference_m});
      ++index;
    }
  }
  return cases;
}

inline double median(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

/// max_i |p[i] - reference(i h)| over the bench grid.
inline double sup_error_against(const PriceFunction& p, const PriceFunction& reference) {
  double e = 0.0;
  for (std::size_t i = 0; i <= p.grid_size(); ++i) e = std::max(e, std::abs(p[i] - reference(p.stage(i))));
  return e;
}

namespace detail {

inline BenchRecord bench_method(const BenchCase& bc, Method method, const PriceFunction& reference,
                                int repeats, const BenchOptions& options) {
  SolverOptions so;
  so.tol = options.tol;
  so.max_iter = options.max_iter;
  so.max_seconds = options.max_seconds;
  so.compute_residual = false;
  so.op.threads = options.threads;

  BenchRecord rec;
  rec.case_name = bc.name;
  rec.method = method;
  rec.m = bc.m;
  rec.reference_m = bc.reference_m;

  using clock = std::chrono::steady_clock;
  std::vector<double> times;
  Solution last;
  for (int r = 0; r <= repeats; ++r) { // r == 0 is the warm-up
    auto start = clock::now();
    try {
      last = solve(bc.model, bc.m, method, Variant::deterministic, so);
    } catch (const MaxIterationsExceeded& e) {
      double elapsed = std::chrono::duration<double>(clock::now() - start).count();
      rec.timeout = true;
      rec.median_seconds = elapsed;
      rec.iterations = e.partial().iterations;
      rec.sup_error = sup_error_against(e.partial().price, reference);
      return rec;
    }
    double elapsed = std::chrono::duration<double>(clock::now() - start).count();
    if (r > 0) times.push_back(elapsed);
  }
  rec.median_seconds = median(times);
  rec.iterations = method == Method::iterate ? last.iterations : 0;
  rec.sup_error = sup_error_against(last.price, reference);
  return rec;
}

} // namespace detail

/// Each case: reference solve at reference_m, then per method one warm-up and
/// `repeats` timed solves; records the median time and the sup error against
/// the reference.
inline BenchReport run_benchmark(const std::vector<BenchCase>& cases, int repeats, const BenchOptions& options = {}) {
  if (repeats < 1) throw DomainError("repeats must be >= 1");
  std::vector<std::pair<BenchRecord, BenchRecord>> rows(cases.size());
  auto run_case = [&](std::size_t c) {
    const BenchCase& bc = cases[c];
    SolverOptions ref_opts;
    ref_opts.compute_residual = false;
    ref_opts.op.threads = options.concurrent_cases ? 1 : options.threads;
    PriceFunction reference = solve_recursive(bc.model, bc.reference_m, Variant::deterministic, ref_opts).price;
    rows[c].first = detail::bench_method(bc, Method::iterate, reference, repeats, options);
    rows[c].second = detail::bench_method(bc, Method::recursive, reference, repeats, options);
  };
  if (options.concurrent_cases)
    parallel_for(0, cases.size(), static_cast<unsigned>(cases.size()), run_case);
  else
    for (std::size_t c = 0; c < cases.size(); ++c) run_case(c);

  BenchReport report;
  for (auto& [it, rec] : rows) {
    report.records.push_back(std::move(it));
    report.records.push_back(std::move(rec));
  }
  return report;
}

} // namespace chainsolve
