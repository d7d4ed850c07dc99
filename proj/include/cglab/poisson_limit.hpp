#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "cglab/atomic.hpp"
#include "cglab/core.hpp"
#include "cglab/discrete.hpp"
#include "cglab/errors.hpp"
#include "cglab/wardrop.hpp"

namespace cglab {

// Smoothed cost c^(x) = E c(1 + X), X ~ Poisson(x).
inline CostFunction make_aux_cost(const CostFunction& base, double tail_tol = kDefaultTailTol) {
  return CostFunction::poissonized(base, tail_tol);
}

inline Certified aux_cost_eval(const CostFunction& aux, double x) {
  if (!aux.is_poissonized()) throw DomainError("aux_cost_eval needs a Poisson-smoothed cost");
  return aux.smoothed(x, 0);
}

// E[Delta^j c(1 + X)] through an explicit truncated pmf, tightened until the
// certified error is below the cost's tail tolerance.
inline Certified aux_cost_derivative(const CostFunction& aux, double x, int j) {
  if (!aux.is_poissonized()) throw DomainError("aux_cost_derivative needs a Poisson-smoothed cost");
  if (j < 1 || j > 2) throw DomainError("derivative order must be 1 or 2");
  const CostFunction& base = aux.base();
  const GrowthEnvelope env = base.envelope()->shifted(1.0 + j, std::ldexp(1.0, j));
  const auto h = [&](std::int64_t k) { return base.difference(1 + k, j); };
  double tol = std::min(aux.tail_tol(), 0.5);
  for (int attempt = 0; attempt < 12; ++attempt, tol *= 1e-3) {
    if (!(tol > 1e-300)) break;
    try {
      const auto r = expect_over(poisson_pmf(x, tol), h, &env);
      if (r.error < aux.tail_tol()) return r;
    } catch (const PrecisionError&) {
      // envelope ratio not yet below one at this truncation point
    }
  }
  throw PrecisionError("aux_cost_derivative: could not certify the series tail");
}

// Nonatomic game whose resources carry the smoothed costs of the given integer costs.
inline Structure build_limit_game(const Structure& g, double tail_tol = kDefaultTailTol) {
  std::vector<CostFunction> costs;
  for (std::size_t e = 0; e < g.resource_count(); ++e) {
    const auto& c = g.cost(e);
    if (!c.integer_domain()) throw DomainError("build_limit_game needs integer-domain costs");
    if (!c.envelope()) throw PrecisionError("resource '" + g.resource_id(e) + "' has no growth envelope");
    costs.push_back(make_aux_cost(c, tail_tol));
  }
  return g.with_costs(std::move(costs));
}

struct BoundConstants {
  Model model = Model::weighted;
  double alpha = 0.0;
  double beta = 0.0;
  std::optional<double> gamma;  // weighted only
  double zeta = 0.0;
  double nu = 0.0;  // Bernoulli only
  std::size_t kappa = 0;
  double C = 0.0;
  double theta = 0.0;      // weighted
  double xi = 0.0;         // weighted
  double theta_hat = 0.0;  // Bernoulli
  double xi_hat = 0.0;     // Bernoulli
  // Alternative beta sources, reported when available.
  std::optional<double> beta_affine;
  std::optional<double> beta_remark;
  std::string beta_source;
};

struct ConstantOverrides {
  std::optional<double> beta;
  std::optional<double> gamma;
  std::optional<double> zeta;
  std::string beta_source = "override";
};

namespace detail {

inline double nu_edge(const CostFunction& c, double alpha) {
  const GrowthEnvelope env = c.envelope()->shifted(3.0, 4.0);
  const auto r = poisson_expectation(alpha, [&](std::int64_t k) { return std::abs(c.difference(1 + k, 2)); }, env, 1e-12);
  return r.upper();
}

inline void require_envelope(const Structure& g) {
  for (std::size_t e = 0; e < g.resource_count(); ++e)
    if (!g.cost(e).integer_domain() || !g.cost(e).envelope())
      throw ConfigurationError("resource '" + g.resource_id(e) + "' needs an integer-domain cost with a growth envelope");
}

}  // namespace detail

inline BoundConstants regularity_constants(const Structure& g, double alpha, Model model, const ConstantOverrides& ov = {}) {
  if (!(alpha > 0.0)) throw DomainError("alpha must be > 0");
  BoundConstants k;
  k.model = model;
  k.alpha = alpha;
  k.kappa = g.kappa();
  const double a = static_cast<double>(k.kappa);

  if (model == Model::bernoulli) {
    detail::require_envelope(g);
    double slope12 = 0.0;
    double delta = std::numeric_limits<double>::infinity();
    bool all_affine = true;
    double min_a = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < g.resource_count(); ++e) {
      const auto& c = g.cost(e);
      k.nu = std::max(k.nu, detail::nu_edge(c, alpha));
      const double d12 = c.at(2) - c.at(1);
      slope12 = std::max(slope12, d12);
      delta = std::min(delta, d12);
      if (const auto* af = std::get_if<CostFunction::Affine>(&c.variant())) {
        min_a = std::min(min_a, af->a);
      } else {
        all_affine = false;
      }
    }
    k.zeta = ov.zeta.value_or(std::expm1(alpha) * k.nu + slope12);
    const Structure limit = build_limit_game(g, 1e-12);
    double C = 0.0;
    for (std::size_t t = 0; t < g.type_count(); ++t)
      for (std::size_t s = 0; s < g.strategy_count(t); ++s) {
        double v = 0.0;
        for (std::size_t e : g.strategy(t, s)) v += aux_cost_eval(limit.cost(e), alpha).upper();
        C = std::max(C, v);
      }
    k.C = C;
    if (all_affine) k.beta_affine = min_a;
    k.beta_remark = delta * std::exp(-alpha);
    if (ov.beta) {
      k.beta = *ov.beta;
      k.beta_source = ov.beta_source;
    } else if (all_affine && min_a > 0.0) {
      k.beta = min_a;
      k.beta_source = "affine slope";
    } else if (*k.beta_remark > 0.0) {
      k.beta = *k.beta_remark;
      k.beta_source = "delta*exp(-alpha)";
    } else {
      throw ConfigurationError("no positive beta: some smoothed cost is flat; supply an override");
    }
    if (!(k.beta > 0.0)) throw ConfigurationError("beta must be > 0");
    k.theta_hat = std::sqrt(2.0 * alpha * a / k.beta);
    k.xi_hat = std::sqrt(2.0 * k.C / k.beta);
    return k;
  }

  // Weighted model: smooth costs on [0, alpha].
  double zeta = 0.0, gamma = 0.0, beta = std::numeric_limits<double>::infinity();
  bool closed_form = true;
  for (std::size_t e = 0; e < g.resource_count(); ++e) {
    const auto& c = g.cost(e);
    if (!(c.is_affine() || c.is_polynomial())) {
      closed_form = false;
      continue;
    }
    // Nonnegative coefficients: c' and c'' are nondecreasing on [0, alpha].
    zeta = std::max(zeta, c.derivative(alpha, 1));
    gamma = std::max(gamma, c.derivative(alpha, 2));
    beta = std::min(beta, c.derivative(0.0, 1));
  }
  if (!closed_form && (!ov.zeta || !ov.gamma || !ov.beta))
    throw ConfigurationError("weighted constants for table or smoothed costs must be declared (beta, gamma, zeta)");
  k.zeta = ov.zeta.value_or(zeta);
  k.gamma = ov.gamma.value_or(gamma);
  if (closed_form) k.beta_affine = beta;
  if (ov.beta) {
    k.beta = *ov.beta;
    k.beta_source = ov.beta_source;
  } else {
    k.beta = beta;
    k.beta_source = "min slope";
  }
  if (!(k.beta > 0.0)) throw ConfigurationError("no positive beta: some cost is flat on [0, alpha]; supply an override");
  k.C = max_strategy_cost_at(g, alpha);
  k.theta = std::sqrt(alpha / 4.0) + std::sqrt(2.0 * alpha * a * (k.zeta + *k.gamma * alpha / 4.0) / k.beta);
  k.xi = std::sqrt(2.0 * k.C / k.beta);
  return k;
}

inline double lambda_bound(const BoundConstants& k, double r) {
  if (!(r >= 0.0) || r >= 1.0) throw DomainError("lambda_bound: r must lie in [0,1)");
  return 0.5 * k.alpha * k.nu * r * std::exp(r) / ((1.0 - r) * (1.0 - r)) + k.zeta * r;
}

struct RateBound {
  double base = 0.0;      // single game
  double with_gap = 0.0;  // sequence form with demand gap
};

// Weighted: param = max weight; Bernoulli: param = max participation probability.
inline RateBound rate_bounds(const BoundConstants& k, Model model, double param, double demand_gap_l1 = 0.0) {
  if (!(param >= 0.0)) throw DomainError("rate_bounds: parameter must be >= 0");
  if (!(demand_gap_l1 >= 0.0)) throw DomainError("rate_bounds: demand gap must be >= 0");
  RateBound r;
  if (model == Model::weighted) {
    if (k.model != Model::weighted || !k.gamma) throw ConfigurationError("weighted rate bound needs gamma");
    r.base = k.theta * std::sqrt(param);
    r.with_gap = r.base + (demand_gap_l1 > 0.0 ? k.xi * std::sqrt(demand_gap_l1) : 0.0);
  } else {
    if (k.model != Model::bernoulli) throw ConfigurationError("Bernoulli rate bound needs Bernoulli constants");
    r.base = param + k.theta_hat * std::sqrt(lambda_bound(k, param));
    r.with_gap = r.base + (demand_gap_l1 > 0.0 ? k.xi_hat * std::sqrt(demand_gap_l1) : 0.0);
  }
  return r;
}

inline double poa_polynomial_bound(int d) {
  if (d < 1) throw DomainError("poa_polynomial_bound: degree must be >= 1");
  const double q = (d + 1.0) * std::pow(d + 1.0, 1.0 / d);
  return q / (q - d);
}

// Lower bound on the slope of resource e over [0, alpha]: of c_e in the
// weighted model, of the smoothed c^_e in the Bernoulli model.
inline double slope_lower_bound(const CostFunction& c, double alpha, Model model) {
  if (model == Model::weighted) {
    if (c.is_affine() || c.is_polynomial()) return c.derivative(0.0, 1);
    throw ConfigurationError("slope bound needs an affine or polynomial cost in the weighted model");
  }
  if (const auto* af = std::get_if<CostFunction::Affine>(&c.variant())) return af->a;
  // Grid minimum of c^' minus the worst drift between nodes; |c^''| <= e^alpha * nu_e.
  const CostFunction aux = make_aux_cost(c, 1e-13);
  const double drift = std::exp(alpha) * detail::nu_edge(c, alpha);
  constexpr int kNodes = 400;
  const double h = alpha / kNodes;
  double lo = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kNodes; ++i) lo = std::min(lo, aux_cost_derivative(aux, i * h, 1).lower());
  return std::max(0.0, lo - 0.5 * h * drift);
}

// Smallest beta with sum_e beta (x_e - z_e)^2 <= sum_e b_e (x_e - z_e)^2 for all
// load pairs x, z of the same demand, where b_e are per-resource slope bounds.
// Returns nullopt if every type has a single strategy (no such directions).
inline std::optional<double> restricted_monotonicity(const Structure& g, double alpha, Model model) {
  const auto E = static_cast<Eigen::Index>(g.resource_count());
  std::vector<Eigen::VectorXd> dirs;
  for (std::size_t t = 0; t < g.type_count(); ++t)
    for (std::size_t s = 1; s < g.strategy_count(t); ++s) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(E);
      for (std::size_t e : g.strategy(t, s)) v(static_cast<Eigen::Index>(e)) += 1.0;
      for (std::size_t e : g.strategy(t, 0)) v(static_cast<Eigen::Index>(e)) -= 1.0;
      dirs.push_back(std::move(v));
    }
  if (dirs.empty()) return std::nullopt;
  Eigen::MatrixXd M(E, static_cast<Eigen::Index>(dirs.size()));
  for (std::size_t j = 0; j < dirs.size(); ++j) M.col(static_cast<Eigen::Index>(j)) = dirs[j];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-10 * sv(0)) ++rank;
  if (rank == 0) return std::nullopt;
  const Eigen::MatrixXd Q = svd.matrixU().leftCols(rank);
  Eigen::VectorXd b(E);
  for (Eigen::Index e = 0; e < E; ++e) b(e) = slope_lower_bound(g.cost(static_cast<std::size_t>(e)), alpha, model);
  const Eigen::MatrixXd R = Q.transpose() * b.asDiagonal() * Q;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(R);
  return std::max(0.0, eig.eigenvalues()(0));
}

// Constants with beta taken from the default sources, or from the restricted
// modulus when those give nothing positive.
inline BoundConstants regularity_constants_auto(const Structure& g, double alpha, Model model) {
  try {
    return regularity_constants(g, alpha, model);
  } catch (const ConfigurationError&) {
    const auto b = restricted_monotonicity(g, alpha, model);
    if (!b || !(*b > 0.0)) throw;
    ConstantOverrides ov;
    ov.beta = *b;
    ov.beta_source = "restricted modulus";
    return regularity_constants(g, alpha, model, ov);
  }
}

}  // namespace cglab
