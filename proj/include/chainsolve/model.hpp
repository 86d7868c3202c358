#pragma once

// Economic primitives: the in-house cost c, the proportional transaction
// coefficient delta and the additive partnership cost g.

#include "chainsolve/error.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chainsolve {

enum class CostFamily {
  exp_affine,      // e^{a s} - 1
  power,           // s^theta
  poly_affine,     // s^2 + s
  exp_plus_square, // e^s + s^2 - 1
  exp_square,      // e^{s^2} - 1
};

enum class GFamily {
  linear, // beta (k - 1)
  power,  // beta (k - 1)^gamma
};

inline std::string_view to_string(CostFamily f) {
  switch (f) {
  case CostFamily::exp_affine: return "exp_affine";
  case CostFamily::power: return "power";
  case CostFamily::poly_affine: return "poly_affine";
  case CostFamily::exp_plus_square: return "exp_plus_square";
  case CostFamily::exp_square: return "exp_square";
  }
  return "?";
}

inline std::string_view to_string(GFamily f) {
  return f == GFamily::linear ? "linear" : "power";
}

inline CostFamily parse_cost_family(std::string_view name) {
  if (name == "exp_affine") return CostFamily::exp_affine;
  if (name == "power") return CostFamily::power;
  if (name == "poly_affine") return CostFamily::poly_affine;
  if (name == "exp_plus_square") return CostFamily::exp_plus_square;
  if (name == "exp_square") return CostFamily::exp_square;
  throw UnknownFamily("unknown cost family '" + std::string(name) + "'");
}

inline GFamily parse_g_family(std::string_view name) {
  if (name == "linear") return GFamily::linear;
  if (name == "power") return GFamily::power;
  throw UnknownFamily("unknown transaction-cost family '" + std::string(name) + "'");
}

/// In-house production cost. `param` is `a` for exp_affine and `theta` for
/// power; the remaining families have no free parameter.
class CostSpec {
public:
  CostSpec(CostFamily family, double param = 1.0) : family_(family), param_(param) {}

  CostFamily family() const noexcept { return family_; }
  double param() const noexcept { return param_; }

  double value(double x) const {
    switch (family_) {
    case CostFamily::exp_affine: return std::expm1(param_ * x);
    case CostFamily::power: return x == 0.0 ? 0.0 : std::pow(x, param_);
    case CostFamily::poly_affine: return x * x + x;
    case CostFamily::exp_plus_square: return std::expm1(x) + x * x;
    case CostFamily::exp_square: return std::expm1(x * x);
    }
    return 0.0;
  }

  double derivative(double x) const {
    switch (family_) {
    case CostFamily::exp_affine: return param_ * std::exp(param_ * x);
    case CostFamily::power:
      if (x == 0.0) return param_ > 1.0 ? 0.0 : (param_ == 1.0 ? 1.0 : INFINITY);
      return param_ * std::pow(x, param_ - 1.0);
    case CostFamily::poly_affine: return 2.0 * x + 1.0;
    case CostFamily::exp_plus_square: return std::exp(x) + 2.0 * x;
    case CostFamily::exp_square: return 2.0 * x * std::exp(x * x);
    }
    return 0.0;
  }

private:
  CostFamily family_;
  double param_;
};

class TransactionSpec {
public:
  TransactionSpec(double delta, GFamily g_family, double beta, double gamma = 1.0)
      : delta_(delta), g_family_(g_family), beta_(beta), gamma_(gamma) {}

  double delta() const noexcept { return delta_; }
  GFamily g_family() const noexcept { return g_family_; }
  double beta() const noexcept { return beta_; }
  double gamma() const noexcept { return gamma_; }

  double g(std::int64_t k) const { return g_real(static_cast<double>(k)); }

  /// g extended to real arguments; zero at and below 1.
  double g_real(double x) const {
    if (x <= 1.0) return 0.0;
    double excess = x - 1.0;
    return g_family_ == GFamily::linear ? beta_ * excess : beta_ * std::pow(excess, gamma_);
  }

private:
  double delta_;
  GFamily g_family_;
  double beta_;
  double gamma_;
};

/// Parsed (not yet validated) model description.
struct ModelConfig {
  std::string cost_family;
  std::map<std::string, double> cost_params;
  double delta = 0.0;
  std::string g_family = "linear";
  double beta = 0.0;
  std::optional<double> gamma;
};

/// Validated model. Construct through make_model().
class ModelSpec {
public:
  ModelSpec(CostSpec cost, TransactionSpec transaction, std::vector<std::string> warnings = {})
      : cost_(cost), transaction_(transaction), warnings_(std::move(warnings)),
        c1_(cost.value(1.0)), dc1_(cost.derivative(1.0)) {
    double d0 = cost.derivative(0.0);
    lower_slope_ = d0 > kSlopeFloor ? d0 : kSlopeFloor;
  }

  static constexpr double kSlopeFloor = 1e-12;

  const CostSpec& cost() const noexcept { return cost_; }
  const TransactionSpec& transaction() const noexcept { return transaction_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  double delta() const noexcept { return transaction_.delta(); }
  double c(double x) const { return cost_.value(x); }
  double dc(double x) const { return cost_.derivative(x); }
  double g(std::int64_t k) const { return transaction_.g(k); }

  /// c(1); every equilibrium price lies below it.
  double c_at_one() const noexcept { return c1_; }
  /// c'(1), the Lipschitz constant of grid solutions.
  double slope_at_one() const noexcept { return dc1_; }
  /// Slope of the lower envelope u0: c'(0), floored at 1e-12.
  double lower_slope() const noexcept { return lower_slope_; }

  ModelSpec with_delta(double delta) const;
  ModelSpec with_beta(double beta) const;

private:
  CostSpec cost_;
  TransactionSpec transaction_;
  std::vector<std::string> warnings_;
  double c1_;
  double dc1_;
  double lower_slope_;
};

inline constexpr int kValidationPoints = 1000;

namespace detail {

inline void require_positive(const std::string& name, double v) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw ParameterOutOfRange(name, name + " must be a positive finite number");
}

inline void check_cost(const CostSpec& cost, std::vector<std::string>& warnings) {
  if (cost.value(0.0) != 0.0) throw AssumptionViolated(0.0, "c(0) != 0");
  if (!std::isfinite(cost.value(1.0)) || !std::isfinite(cost.derivative(1.0)))
    throw ParameterOutOfRange("cost", "c(1) or c'(1) is not finite");

  double prev_value = 0.0;
  double prev_slope = -INFINITY;
  for (int i = 1; i <= kValidationPoints; ++i) {
    double s = static_cast<double>(i) / kValidationPoints;
    double v = cost.value(s);
    double d = cost.derivative(s);
    if (!(d > 1e-12))
      throw AssumptionViolated(s, "c'(s) is not positive at s=" + std::to_string(s));
    if (!(v > prev_value))
      throw AssumptionViolated(s, "c is not strictly increasing at s=" + std::to_string(s));
    if (!(d > prev_slope))
      throw AssumptionViolated(s, "c is not strictly convex at s=" + std::to_string(s));
    prev_value = v;
    prev_slope = d;
  }
  if (!(cost.derivative(0.0) > 0.0))
    warnings.push_back("c'(0) = 0 violates c'(0) > 0; lower envelope uses slope 1e-12");
}

inline void check_transaction(const TransactionSpec& tr) {
  if (!(tr.delta() > 1.0) || !std::isfinite(tr.delta()))
    throw ParameterOutOfRange("delta", "delta must be > 1");
  require_positive("beta", tr.beta());
  if (tr.g_family() == GFamily::power && !(tr.gamma() >= 1.0 && std::isfinite(tr.gamma())))
    throw ParameterOutOfRange("gamma", "gamma must be >= 1");
  if (tr.g(1) != 0.0) throw AssumptionViolated(1.0, "g(1) != 0");
  if (!(tr.g(2) > 0.0)) throw AssumptionViolated(2.0, "g(2) must be positive");
}

inline double param_or_throw(const ModelConfig& cfg, const std::string& name) {
  auto it = cfg.cost_params.find(name);
  if (it == cfg.cost_params.end())
    throw ParameterOutOfRange(name, "cost family " + cfg.cost_family + " requires parameter " + name);
  return it->second;
}

} // namespace detail

/// Validates both components and returns the model. Throws UnknownFamily,
/// ParameterOutOfRange or AssumptionViolated.
inline ModelSpec make_model(const CostSpec& cost, const TransactionSpec& transaction) {
  std::vector<std::string> warnings;
  if (cost.family() == CostFamily::exp_affine) detail::require_positive("a", cost.param());
  if (cost.family() == CostFamily::power) detail::require_positive("theta", cost.param());
  detail::check_transaction(transaction);
  detail::check_cost(cost, warnings);
  return ModelSpec(cost, transaction, std::move(warnings));
}

inline ModelSpec make_model(const ModelConfig& cfg) {
  CostFamily family = parse_cost_family(cfg.cost_family);
  GFamily g_family = parse_g_family(cfg.g_family);
  double param = 1.0;
  if (family == CostFamily::exp_affine) param = detail::param_or_throw(cfg, "a");
  if (family == CostFamily::power) param = detail::param_or_throw(cfg, "theta");
  double gamma = 1.0;
  if (g_family == GFamily::power) {
    if (!cfg.gamma) throw ParameterOutOfRange("gamma", "power g family requires gamma");
    gamma = *cfg.gamma;
  }
  return make_model(CostSpec(family, param), TransactionSpec(cfg.delta, g_family, cfg.beta, gamma));
}

inline ModelSpec ModelSpec::with_delta(double delta) const {
  return make_model(cost_, TransactionSpec(delta, transaction_.g_family(), transaction_.beta(),
                                           transaction_.gamma()));
}

inline ModelSpec ModelSpec::with_beta(double beta) const {
  return make_model(cost_, TransactionSpec(transaction_.delta(), transaction_.g_family(), beta,
                                           transaction_.gamma()));
}

inline double eval_cost(const ModelSpec& model, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("cost evaluated outside [0,1]");
  return model.c(x);
}

inline double eval_g(const ModelSpec& model, std::int64_t k) {
  if (k < 1) throw DomainError("g evaluated at k < 1");
  return model.g(k);
}

} // namespace chainsolve
