#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cglab/core.hpp"
#include "cglab/discrete.hpp"
#include "cglab/errors.hpp"
#include "cglab/poisson_limit.hpp"
#include "cglab/wardrop.hpp"

namespace cglab {

// Law of the per-type player counts: independent Poisson(d_t), or for each
// type a product of Bernoulli(r_i) participations.
class PopulationModel {
 public:
  struct IndependentPoisson {
    std::vector<double> means;
  };
  struct BernoulliProduct {
    std::vector<std::vector<double>> probs;
  };

  static PopulationModel independent_poisson(std::vector<double> means) {
    for (double d : means)
      if (!(d > 0.0) || !std::isfinite(d)) throw DomainError("Poisson population means must be finite and > 0");
    return PopulationModel(IndependentPoisson{std::move(means)});
  }

  static PopulationModel bernoulli_product(std::vector<std::vector<double>> probs) {
    for (const auto& rs : probs)
      for (double r : rs)
        if (!(r > 0.0 && r <= 1.0)) throw DomainError("participation probabilities must lie in (0,1]");
    return PopulationModel(BernoulliProduct{std::move(probs)});
  }

  bool is_poisson() const { return std::holds_alternative<IndependentPoisson>(v_); }

  std::size_t type_count() const {
    if (const auto* p = std::get_if<IndependentPoisson>(&v_)) return p->means.size();
    return std::get<BernoulliProduct>(v_).probs.size();
  }

  double mean(std::size_t t) const {
    if (const auto* p = std::get_if<IndependentPoisson>(&v_)) return p->means.at(t);
    double m = 0.0;
    for (double r : std::get<BernoulliProduct>(v_).probs.at(t)) m += r;
    return m;
  }

  // P(N_t = k).
  double count_prob(std::size_t t, std::int64_t k) const {
    if (k < 0) return 0.0;
    if (const auto* p = std::get_if<IndependentPoisson>(&v_)) return std::exp(detail::log_poisson(p->means.at(t), static_cast<double>(k)));
    return bernoulli_sum_pmf(std::get<BernoulliProduct>(v_).probs.at(t)).at(k);
  }

  // Law of N_t; Poisson laws are truncated with certified tail below tail_tol.
  Pmf count_pmf(std::size_t t, double tail_tol = 1e-12) const {
    if (const auto* p = std::get_if<IndependentPoisson>(&v_)) return poisson_pmf(p->means.at(t), tail_tol);
    return bernoulli_sum_pmf(std::get<BernoulliProduct>(v_).probs.at(t));
  }

  // mu(n) for a count vector n.
  double prior(std::span<const std::int64_t> n) const {
    if (n.size() != type_count()) throw StructuralError("count vector size does not match the type count");
    double p = 1.0;
    for (std::size_t t = 0; t < n.size(); ++t) p *= count_prob(t, n[t]);
    return p;
  }

 private:
  explicit PopulationModel(std::variant<IndependentPoisson, BernoulliProduct> v) : v_(std::move(v)) {}
  std::variant<IndependentPoisson, BernoulliProduct> v_;
};

// One distribution per type over that type's strategies.
struct TypeProfile {
  std::vector<std::vector<double>> sigma;

  void validate(const Structure& g) const {
    if (sigma.size() != g.type_count()) throw StructuralError("type profile size does not match the type count");
    for (std::size_t t = 0; t < sigma.size(); ++t) {
      if (sigma[t].size() != g.strategy_count(t)) throw StructuralError("type profile entry has the wrong number of strategies");
      double s = 0.0;
      for (double p : sigma[t]) {
        if (!(p >= 0.0)) throw DomainError("type profile probabilities must be >= 0");
        s += p;
      }
      if (std::abs(s - 1.0) > 1e-12) throw DomainError("type profile entry does not sum to 1");
    }
  }
};

// P(Y = n): mu(n-bar) times independent multinomials per type.
// counts[t][s] is the number of type-t players on strategy s.
inline double flow_profile_probability(const PopulationModel& m, const TypeProfile& sigma, const std::vector<std::vector<std::int64_t>>& counts) {
  if (counts.size() != m.type_count() || sigma.sigma.size() != m.type_count()) throw StructuralError("count/profile size mismatch");
  std::vector<std::int64_t> nbar(counts.size(), 0);
  double logm = 0.0;
  for (std::size_t t = 0; t < counts.size(); ++t) {
    if (counts[t].size() != sigma.sigma[t].size()) throw StructuralError("count vector has the wrong number of strategies");
    for (std::size_t s = 0; s < counts[t].size(); ++s) {
      const std::int64_t k = counts[t][s];
      if (k < 0) throw DomainError("counts must be nonnegative");
      nbar[t] += k;
      if (k == 0) continue;
      if (sigma.sigma[t][s] == 0.0) return 0.0;
      logm += static_cast<double>(k) * std::log(sigma.sigma[t][s]) - std::lgamma(static_cast<double>(k) + 1.0);
    }
    logm += std::lgamma(static_cast<double>(nbar[t]) + 1.0);
  }
  return m.prior(nbar) * std::exp(logm);
}

// mu(n-bar | t): law of the other players' counts seen by a type-t player.
inline double posterior(const PopulationModel& m, std::size_t t, std::span<const std::int64_t> nbar) {
  if (t >= m.type_count()) throw StructuralError("type index out of range");
  const double mean = m.mean(t);
  if (!(mean > 0.0)) throw DomainError("posterior needs a type with positive expected count");
  std::vector<std::int64_t> shifted(nbar.begin(), nbar.end());
  shifted.at(t) += 1;
  return static_cast<double>(nbar[t] + 1) * m.prior(shifted) / mean;
}

// Marginal posterior of the other type-t players' count.
inline Pmf posterior_count_pmf(const PopulationModel& m, std::size_t t, double tail_tol = 1e-12) {
  const double mean = m.mean(t);
  if (!(mean > 0.0)) throw DomainError("posterior needs a type with positive expected count");
  const Pmf prior = m.count_pmf(t, tail_tol);
  Pmf post;
  for (std::size_t k = 0; k + 1 < prior.size(); ++k) post.probs.push_back(static_cast<double>(k + 1) * prior.probs[k + 1] / mean);
  if (post.probs.empty()) post.probs.push_back(0.0);
  double s = 0.0;
  for (double p : post.probs) s += p;
  post.tail_mass = std::max(0.0, 1.0 - s);
  if (m.is_poisson()) post.poisson_mean = mean;
  return post;
}

struct PoissonGameReport {
  double max_regret = 0.0;
  std::vector<double> regret;                     // per type
  std::vector<std::vector<double>> strategy_cost;  // per type, per strategy
  std::vector<double> loads;
};

inline std::vector<double> flows_from_type_profile(const Structure& g, const DemandVector& d, const TypeProfile& sigma) {
  sigma.validate(g);
  std::vector<double> y(g.strategy_count(), 0.0);
  for (std::size_t t = 0; t < g.type_count(); ++t)
    for (std::size_t s = 0; s < g.strategy_count(t); ++s) y[g.flat(t, s)] = d[t] * sigma.sigma[t][s];
  return y;
}

// Poisson game on integer costs: strategy s costs sum_{e in s} c^_e(x_e) with
// x from y_{t,s} = d_t sigma_t(s).
inline PoissonGameReport verify_poisson_game_equilibrium(const Structure& g, const DemandVector& d, const TypeProfile& sigma,
                                                         double tail_tol = kDefaultTailTol) {
  if (d.size() != g.type_count()) throw StructuralError("demand vector size does not match the type count");
  for (std::size_t t = 0; t < d.size(); ++t)
    if (!(d[t] > 0.0)) throw DomainError("Poisson games need positive expected demands");
  const Structure limit = build_limit_game(g, tail_tol);
  PoissonGameReport r;
  r.loads = loads_from_flows(g, flows_from_type_profile(g, d, sigma));
  for (std::size_t t = 0; t < g.type_count(); ++t) {
    std::vector<double> c;
    for (std::size_t s = 0; s < g.strategy_count(t); ++s) c.push_back(strategy_cost(limit, r.loads, t, s));
    const double best = *std::min_element(c.begin(), c.end());
    double reg = 0.0;
    for (std::size_t s = 0; s < c.size(); ++s)
      if (sigma.sigma[t][s] > kUsedProb) reg = std::max(reg, c[s] - best);
    r.regret.push_back(reg);
    r.strategy_cost.push_back(std::move(c));
    r.max_regret = std::max(r.max_regret, reg);
  }
  return r;
}

struct EquivalenceReport {
  double flow_gap = 0.0;  // max |y_{t,s} - d_t sigma_t(s)|
  double regret = 0.0;
  double epsilon = 0.0;
  bool flows_match = false;
  bool poisson_equilibrium = false;
  bool wardrop_equilibrium = false;
  bool equivalent = false;
};

// Compares a type profile with a flow/load pair of the smoothed limit game.
inline EquivalenceReport wardrop_equivalence_check(const Structure& g, const DemandVector& d, const TypeProfile& sigma, const FlowLoadPair& pair,
                                                   double tol = 1e-9, double tail_tol = kDefaultTailTol) {
  EquivalenceReport r;
  const auto y = flows_from_type_profile(g, d, sigma);
  if (pair.y.size() != y.size()) throw StructuralError("pair does not match the structure");
  for (std::size_t i = 0; i < y.size(); ++i) r.flow_gap = std::max(r.flow_gap, std::abs(y[i] - pair.y[i]));
  r.flows_match = r.flow_gap <= tol;
  r.regret = verify_poisson_game_equilibrium(g, d, sigma, tail_tol).max_regret;
  r.epsilon = wardrop_epsilon(build_limit_game(g, tail_tol), d, pair);
  r.poisson_equilibrium = r.regret <= tol;
  r.wardrop_equilibrium = r.epsilon <= tol * (1.0 + static_cast<double>(g.kappa()));
  r.equivalent = r.flows_match && r.poisson_equilibrium == r.wardrop_equilibrium;
  return r;
}

}  // namespace cglab
