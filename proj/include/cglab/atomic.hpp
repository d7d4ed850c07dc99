#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "cglab/core.hpp"
#include "cglab/discrete.hpp"
#include "cglab/errors.hpp"

namespace cglab {

enum class Model { weighted, bernoulli };

inline const char* model_name(Model m) { return m == Model::weighted ? "weighted" : "bernoulli"; }

// Atomic congestion game. In the weighted model player i always plays with
// weight w_i; in the Bernoulli model player i has unit weight and takes part
// with probability r_i. `param` holds w_i or r_i.
template <Model M>
class AtomicGame {
 public:
  struct Player {
    double param = 1.0;
    std::size_t type = 0;
  };

  AtomicGame() = default;

  AtomicGame(Structure structure, std::vector<Player> players) : structure_(std::move(structure)), players_(std::move(players)) {
    demand_.assign(structure_.type_count(), 0.0);
    for (const auto& p : players_) {
      if (p.type >= structure_.type_count()) throw StructuralError("player type index out of range");
      if constexpr (M == Model::weighted) {
        if (!(p.param > 0.0) || !std::isfinite(p.param)) throw DomainError("player weights must be finite and > 0");
      } else {
        if (!(p.param > 0.0 && p.param <= 1.0)) throw DomainError("participation probabilities must lie in (0,1]");
      }
      demand_[p.type] += p.param;
    }
    for (std::size_t e = 0; e < structure_.resource_count(); ++e) {
      if constexpr (M == Model::weighted) {
        if (!structure_.cost(e).continuous_domain())
          throw DomainError("weighted games need costs on the reals (resource '" + structure_.resource_id(e) + "')");
      } else {
        if (!structure_.cost(e).integer_domain())
          throw DomainError("Bernoulli games need costs on the integers (resource '" + structure_.resource_id(e) + "')");
      }
    }
  }

  const Structure& structure() const { return structure_; }
  std::size_t size() const { return players_.size(); }
  const Player& player(std::size_t i) const { return players_.at(i); }
  const std::vector<Player>& players() const { return players_; }
  std::size_t type(std::size_t i) const { return players_.at(i).type; }

  double weight(std::size_t i) const { return M == Model::weighted ? players_.at(i).param : 1.0; }
  double activity(std::size_t i) const { return M == Model::bernoulli ? players_.at(i).param : 1.0; }
  double max_param() const {
    double m = 0.0;
    for (const auto& p : players_) m = std::max(m, p.param);
    return m;
  }

  // Aggregate (expected) demand per type.
  DemandVector demand() const { return DemandVector(demand_); }

  // All players share one type and one weight/probability.
  bool symmetric() const {
    for (const auto& p : players_)
      if (p.type != players_.front().type || p.param != players_.front().param) return false;
    return true;
  }

 private:
  Structure structure_;
  std::vector<Player> players_;
  std::vector<double> demand_;
};

using WeightedGame = AtomicGame<Model::weighted>;
using BernoulliGame = AtomicGame<Model::bernoulli>;

// sigma[i] is a distribution over the strategies of player i's type.
struct MixedProfile {
  std::vector<std::vector<double>> sigma;

  template <Model M>
  void validate(const AtomicGame<M>& g) const {
    if (sigma.size() != g.size()) throw StructuralError("profile has " + std::to_string(sigma.size()) + " players, game has " + std::to_string(g.size()));
    for (std::size_t i = 0; i < sigma.size(); ++i) {
      if (sigma[i].size() != g.structure().strategy_count(g.type(i)))
        throw StructuralError("profile entry " + std::to_string(i) + " has the wrong number of strategies");
      double s = 0.0;
      for (double p : sigma[i]) {
        if (!(p >= 0.0)) throw DomainError("profile probabilities must be >= 0");
        s += p;
      }
      if (std::abs(s - 1.0) > 1e-12) throw DomainError("profile entry " + std::to_string(i) + " does not sum to 1");
    }
  }
};

template <Model M>
MixedProfile pure_profile(const AtomicGame<M>& g, std::span<const std::size_t> choice) {
  if (choice.size() != g.size()) throw StructuralError("pure profile size mismatch");
  MixedProfile p;
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::vector<double> s(g.structure().strategy_count(g.type(i)), 0.0);
    s.at(choice[i]) = 1.0;
    p.sigma.push_back(std::move(s));
  }
  return p;
}

template <Model M>
MixedProfile symmetric_profile(const AtomicGame<M>& g, const std::vector<double>& sigma) {
  MixedProfile p;
  p.sigma.assign(g.size(), sigma);
  p.validate(g);
  return p;
}

// Player i's probability of using resource e.
template <Model M>
double resource_choice_prob(const AtomicGame<M>& g, const MixedProfile& p, std::size_t i, std::size_t e) {
  const auto& st = g.structure();
  double q = 0.0;
  for (std::size_t s = 0; s < st.strategy_count(g.type(i)); ++s)
    if (st.contains(g.type(i), s, e)) q += p.sigma.at(i).at(s);
  return q;
}

struct CostEstimate {
  double value = 0.0;
  double std_error = 0.0;
  bool exact = true;
};

struct AtomicOptions {
  std::optional<std::uint64_t> seed;
  std::size_t mc_samples = 1'000'000;
};

namespace detail {

// Conditional expected edge costs, cached per class of interchangeable players.
template <Model M>
class CostOracle {
 public:
  CostOracle(const AtomicGame<M>& g, const MixedProfile& p, AtomicOptions opt = {}) : g_(g), opt_(std::move(opt)) {
    p.validate(g);
    const auto& st = g.structure();
    pi_.assign(g.size(), std::vector<double>(st.resource_count(), 0.0));
    std::map<std::tuple<std::size_t, double, std::vector<double>>, std::size_t> key;
    class_of_.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (std::size_t e = 0; e < st.resource_count(); ++e) pi_[i][e] = g.activity(i) * resource_choice_prob(g, p, i, e);
      auto [it, fresh] = key.emplace(std::make_tuple(g.type(i), g.player(i).param, p.sigma[i]), reps_.size());
      if (fresh) {
        reps_.push_back(i);
        counts_.push_back(0);
      }
      class_of_[i] = it->second;
      ++counts_[it->second];
    }
    cache_.assign(reps_.size(), std::vector<std::optional<CostEstimate>>(st.resource_count()));
  }

  std::size_t class_count() const { return reps_.size(); }
  std::size_t representative(std::size_t c) const { return reps_[c]; }
  std::size_t class_size(std::size_t c) const { return counts_[c]; }
  std::size_t class_of(std::size_t i) const { return class_of_.at(i); }
  double pi(std::size_t i, std::size_t e) const { return pi_[i][e]; }

  // E c_e(X_{i,e}), the load on e seen by i given that i uses e.
  const CostEstimate& edge(std::size_t i, std::size_t e) {
    auto& slot = cache_[class_of(i)][e];
    if (!slot) slot = compute(reps_[class_of(i)], e);
    return *slot;
  }

  CostEstimate strategy(std::size_t i, std::size_t s) {
    CostEstimate r;
    for (std::size_t e : g_.structure().strategy(g_.type(i), s)) {
      const auto& c = edge(i, e);
      r.value += c.value;
      r.std_error += c.std_error;
      r.exact = r.exact && c.exact;
    }
    return r;
  }

 private:
  CostEstimate compute(std::size_t i, std::size_t e) {
    const CostFunction& c = g_.structure().cost(e);
    double base = g_.weight(i);
    std::vector<double> w, q;
    for (std::size_t j = 0; j < g_.size(); ++j) {
      if (j == i || pi_[j][e] == 0.0) continue;
      if (pi_[j][e] >= 1.0) {
        base += g_.weight(j);
      } else {
        w.push_back(g_.weight(j));
        q.push_back(pi_[j][e]);
      }
    }
    CostEstimate r;
    const bool equal_weights = std::all_of(w.begin(), w.end(), [&](double v) { return v == w.front(); });
    if (equal_weights) {
      const Pmf pmf = bernoulli_sum_pmf(q);
      const double unit = w.empty() ? 0.0 : w.front();
      for (std::size_t k = 0; k < pmf.size(); ++k) {
        if (pmf.probs[k] == 0.0) continue;
        double v;
        if constexpr (M == Model::bernoulli) {
          v = c.at(static_cast<std::int64_t>(std::llround(base)) + static_cast<std::int64_t>(k));
        } else {
          v = c(base + unit * static_cast<double>(k));
        }
        r.value += v * pmf.probs[k];
      }
      return r;
    }
    if (w.size() <= kExactEnumerationLimit) {
      const auto d = weighted_sum_distribution(w, q);
      for (std::size_t k = 0; k < d.values.size(); ++k) r.value += c(base + d.values[k]) * d.masses[k];
      return r;
    }
    if (!opt_.seed) throw ConfigurationError("more than 20 randomizing players with unequal weights: Monte Carlo needs a seed");
    MonteCarlo mc;
    mc.seed = *opt_.seed;
    mc.samples = opt_.mc_samples;
    mc.stream = static_cast<std::uint64_t>(i) * 1'000'003ULL + e;
    const auto d = weighted_sum_distribution(w, q, mc);
    double m2 = 0.0;
    for (std::size_t k = 0; k < d.values.size(); ++k) {
      const double v = c(base + d.values[k]);
      r.value += v * d.masses[k];
      m2 += v * v * d.masses[k];
    }
    r.exact = false;
    r.std_error = std::sqrt(std::max(0.0, m2 - r.value * r.value) / static_cast<double>(d.samples));
    return r;
  }

  const AtomicGame<M>& g_;
  AtomicOptions opt_;
  std::vector<std::vector<double>> pi_;
  std::vector<std::size_t> reps_, counts_, class_of_;
  std::vector<std::vector<std::optional<CostEstimate>>> cache_;
};

}  // namespace detail

template <Model M>
CostEstimate conditional_expected_cost(const AtomicGame<M>& g, const MixedProfile& p, std::size_t i, std::size_t s, const AtomicOptions& opt = {}) {
  if (i >= g.size()) throw StructuralError("player index out of range");
  detail::CostOracle<M> o(g, p, opt);
  return o.strategy(i, s);
}

// Conditional expected cost of each strategy of player i.
template <Model M>
std::vector<CostEstimate> strategy_costs(const AtomicGame<M>& g, const MixedProfile& p, std::size_t i, const AtomicOptions& opt = {}) {
  if (i >= g.size()) throw StructuralError("player index out of range");
  detail::CostOracle<M> o(g, p, opt);
  std::vector<CostEstimate> r;
  for (std::size_t s = 0; s < g.structure().strategy_count(g.type(i)); ++s) r.push_back(o.strategy(i, s));
  return r;
}

struct EquilibriumReport {
  double max_regret = 0.0;
  std::vector<double> regret;  // per player
  bool exact = true;
  bool is_equilibrium(double tol) const { return max_regret <= tol; }
};

inline constexpr double kUsedProb = 1e-10;

template <Model M>
EquilibriumReport verify_equilibrium(const AtomicGame<M>& g, const MixedProfile& p, const AtomicOptions& opt = {}) {
  detail::CostOracle<M> o(g, p, opt);
  const auto& st = g.structure();
  std::vector<double> class_regret(o.class_count(), 0.0);
  EquilibriumReport rep;
  for (std::size_t c = 0; c < o.class_count(); ++c) {
    const std::size_t i = o.representative(c);
    std::vector<double> cost;
    for (std::size_t s = 0; s < st.strategy_count(g.type(i)); ++s) {
      const auto est = o.strategy(i, s);
      rep.exact = rep.exact && est.exact;
      cost.push_back(est.value);
    }
    const double best = *std::min_element(cost.begin(), cost.end());
    for (std::size_t s = 0; s < cost.size(); ++s)
      if (p.sigma[i][s] > kUsedProb) class_regret[c] = std::max(class_regret[c], cost[s] - best);
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    rep.regret.push_back(class_regret[o.class_of(i)]);
    rep.max_regret = std::max(rep.max_regret, rep.regret.back());
  }
  return rep;
}

// Expected social cost: sum_e sum_i w_i a_i sigma_{i,e} E c_e(X_{i,e}).
template <Model M>
CostEstimate esc(const AtomicGame<M>& g, const MixedProfile& p, const AtomicOptions& opt = {}) {
  detail::CostOracle<M> o(g, p, opt);
  CostEstimate r;
  for (std::size_t c = 0; c < o.class_count(); ++c) {
    const std::size_t i = o.representative(c);
    const double n = static_cast<double>(o.class_size(c));
    for (std::size_t e = 0; e < g.structure().resource_count(); ++e) {
      const double f = g.weight(i) * o.pi(i, e);
      if (f == 0.0) continue;
      const auto& est = o.edge(i, e);
      r.value += n * f * est.value;
      r.std_error += n * f * est.std_error;
      r.exact = r.exact && est.exact;
    }
  }
  return r;
}

// Unconditional expected cost borne by player i (participation-weighted).
template <Model M>
double expected_player_cost(const AtomicGame<M>& g, const MixedProfile& p, std::size_t i, const AtomicOptions& opt = {}) {
  const auto c = strategy_costs(g, p, i, opt);
  double v = 0.0;
  for (std::size_t s = 0; s < c.size(); ++s) v += p.sigma.at(i)[s] * c[s].value;
  return g.activity(i) * v;
}

template <Model M>
std::vector<double> expected_loads(const AtomicGame<M>& g, const MixedProfile& p) {
  p.validate(g);
  std::vector<double> x(g.structure().resource_count(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t e = 0; e < x.size(); ++e) x[e] += g.weight(i) * g.activity(i) * resource_choice_prob(g, p, i, e);
  return x;
}

template <Model M>
double load_variance(const AtomicGame<M>& g, const MixedProfile& p, std::size_t e) {
  double v = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double q = g.activity(i) * resource_choice_prob(g, p, i, e);
    v += g.weight(i) * g.weight(i) * q * (1.0 - q);
  }
  return v;
}

// ||X_e - target||_{L2} from the exact mean and variance of the load.
template <Model M>
double l2_distance(const AtomicGame<M>& g, const MixedProfile& p, std::size_t e, double target) {
  const double m = expected_loads(g, p).at(e) - target;
  return std::sqrt(load_variance(g, p, e) + m * m);
}

// Exact law of the load on e: a Pmf for Bernoulli games, point masses for weighted ones.
template <Model M>
auto load_distribution(const AtomicGame<M>& g, const MixedProfile& p, std::size_t e) {
  p.validate(g);
  if (e >= g.structure().resource_count()) throw StructuralError("resource index out of range");
  std::vector<double> w, q;
  double base = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double pi = g.activity(i) * resource_choice_prob(g, p, i, e);
    if (pi == 0.0) continue;
    if constexpr (M == Model::weighted) {
      if (pi >= 1.0) {
        base += g.weight(i);
        continue;
      }
    }
    w.push_back(g.weight(i));
    q.push_back(pi);
  }
  if constexpr (M == Model::bernoulli) {
    return bernoulli_sum_pmf(q);
  } else {
    WeightedDistribution d;
    if (std::all_of(w.begin(), w.end(), [&](double v) { return v == w.front(); })) {
      const Pmf pmf = bernoulli_sum_pmf(q);
      const double unit = w.empty() ? 0.0 : w.front();
      for (std::size_t k = 0; k < pmf.size(); ++k) {
        d.values.push_back(base + unit * static_cast<double>(k));
        d.masses.push_back(pmf.probs[k]);
      }
      return d;
    }
    d = weighted_sum_distribution(w, q);
    for (double& v : d.values) v += base;
    return d;
  }
}

// Cov(Y_s, Y_s') of the random strategy flows of type t (Var when s == s').
template <Model M>
double strategy_flow_covariance(const AtomicGame<M>& g, const MixedProfile& p, std::size_t t, std::size_t s, std::size_t s2) {
  p.validate(g);
  double c = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.type(i) != t) continue;
    const double w2 = g.weight(i) * g.weight(i);
    const double a = g.activity(i) * p.sigma[i].at(s);
    const double b = g.activity(i) * p.sigma[i].at(s2);
    c += s == s2 ? w2 * a * (1.0 - a) : -w2 * a * b;
  }
  return c;
}

enum class TieBreak { keep_current, lowest_index };

inline constexpr double kBestResponseTie = 1e-12;

struct BestResponseResult {
  std::vector<std::size_t> profile;
  bool converged = false;
  bool cycle = false;
  int sweeps = 0;
  double max_regret = 0.0;
  std::vector<std::vector<std::size_t>> cycle_states;  // sweep-boundary states from the first repeat onward
};

// Round-robin exact best responses over pure profiles.
template <Model M>
BestResponseResult best_response_dynamics(const AtomicGame<M>& g, std::vector<std::size_t> start, int max_sweeps = 1000,
                                          TieBreak tie = TieBreak::keep_current, const AtomicOptions& opt = {}) {
  if (start.size() != g.size()) throw StructuralError("initial profile size mismatch");
  for (std::size_t i = 0; i < g.size(); ++i)
    if (start[i] >= g.structure().strategy_count(g.type(i))) throw StructuralError("initial profile uses an invalid strategy");
  BestResponseResult r;
  std::vector<std::vector<std::size_t>> history{start};
  std::set<std::vector<std::size_t>> seen{start};
  auto& cur = start;
  for (r.sweeps = 0; r.sweeps < max_sweeps;) {
    ++r.sweeps;
    bool changed = false;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto costs = strategy_costs(g, pure_profile(g, std::span<const std::size_t>(cur)), i, opt);
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : costs) best = std::min(best, c.value);
      std::size_t pick = cur[i];
      if (!(tie == TieBreak::keep_current && costs[cur[i]].value <= best + kBestResponseTie)) {
        for (std::size_t s = 0; s < costs.size(); ++s)
          if (costs[s].value <= best + kBestResponseTie) {
            pick = s;
            break;
          }
      }
      if (pick != cur[i]) {
        cur[i] = pick;
        changed = true;
      }
    }
    if (!changed) {
      r.converged = true;
      break;
    }
    if (!seen.insert(cur).second) {
      r.cycle = true;
      const auto first = std::find(history.begin(), history.end(), cur);
      r.cycle_states.assign(first, history.end());
      break;
    }
    history.push_back(cur);
  }
  r.profile = cur;
  r.max_regret = verify_equilibrium(g, pure_profile(g, std::span<const std::size_t>(r.profile)), opt).max_regret;
  return r;
}

struct SymmetricResult {
  MixedProfile profile;
  std::vector<double> sigma;
  bool found = false;
  double regret = std::numeric_limits<double>::infinity();
};

// Shared mixed strategy that is an equilibrium when every player adopts it.
// Supports are tried by size: pure strategies, then pairs (scalar indifference
// solved by bisection), then larger supports by a damped exponential-weights
// fixed point restricted to the support.
template <Model M>
SymmetricResult symmetric_mixed_equilibrium(const AtomicGame<M>& g, double tol = 1e-9, double damping = 0.5, const AtomicOptions& opt = {}) {
  if (g.size() == 0 || !g.symmetric()) throw ConfigurationError("symmetric_mixed_equilibrium needs players with one shared type and weight/probability");
  const std::size_t t = g.type(0);
  const std::size_t m = g.structure().strategy_count(t);
  auto costs_at = [&](const std::vector<double>& sigma) {
    const auto c = strategy_costs(g, symmetric_profile(g, sigma), 0, opt);
    std::vector<double> v;
    for (const auto& x : c) v.push_back(x.value);
    return v;
  };
  SymmetricResult best;
  auto accept = [&](std::vector<double> sigma) {
    MixedProfile p = symmetric_profile(g, sigma);
    const double reg = verify_equilibrium(g, p, opt).max_regret;
    if (reg < best.regret) {
      best.regret = reg;
      best.sigma = sigma;
      best.profile = std::move(p);
    }
    best.found = best.regret <= tol;
    return best.found;
  };
  for (std::size_t s = 0; s < m; ++s) {
    std::vector<double> sigma(m, 0.0);
    sigma[s] = 1.0;
    if (accept(sigma)) return best;
  }
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b) {
      auto at = [&](double q) {
        std::vector<double> sigma(m, 0.0);
        sigma[a] = q;
        sigma[b] = 1.0 - q;
        return sigma;
      };
      auto gap = [&](double q) {
        const auto c = costs_at(at(q));
        return c[a] - c[b];
      };
      // gap is nondecreasing in q; an interior root exists only with a sign change.
      if (gap(0.0) >= 0.0 || gap(1.0) <= 0.0) continue;
      double lo = 0.0, hi = 1.0;
      while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        (gap(mid) > 0.0 ? hi : lo) = mid;
      }
      if (accept(at(0.5 * (lo + hi)))) return best;
    }
  // Larger supports.
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << std::min<std::size_t>(m, 20)); ++mask) {
    if (std::popcount(mask) < 3) continue;
    std::vector<double> sigma(m, 0.0);
    const double share = 1.0 / std::popcount(mask);
    for (std::size_t s = 0; s < m; ++s)
      if (mask >> s & 1U) sigma[s] = share;
    for (int it = 0; it < 2000; ++it) {
      const auto c = costs_at(sigma);
      double mean = 0.0, spread = 0.0;
      for (std::size_t s = 0; s < m; ++s) mean += sigma[s] * c[s];
      for (std::size_t s = 0; s < m; ++s)
        if (sigma[s] > 0.0) spread = std::max(spread, std::abs(c[s] - mean));
      if (spread < 1e-13) break;
      std::vector<double> next(m, 0.0);
      double z = 0.0;
      for (std::size_t s = 0; s < m; ++s) {
        if (!(mask >> s & 1U)) continue;
        next[s] = sigma[s] * std::exp(-(c[s] - mean) / std::max(spread, 1e-300));
        z += next[s];
      }
      for (std::size_t s = 0; s < m; ++s) sigma[s] = (1.0 - damping) * sigma[s] + damping * next[s] / z;
    }
    double z = 0.0;
    for (double v : sigma) z += v;
    for (double& v : sigma) v /= z;
    if (accept(sigma)) return best;
  }
  return best;
}

// All count vectors (k_0..k_{m-1}) with sum n, in lexicographic order.
inline std::vector<std::vector<std::size_t>> compositions(std::size_t n, std::size_t m) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> k(m, 0);
  auto rec = [&](auto&& self, std::size_t pos, std::size_t left) -> void {
    if (pos + 1 == m) {
      k[pos] = left;
      out.push_back(k);
      return;
    }
    for (std::size_t v = left + 1; v-- > 0;) {
      k[pos] = v;
      self(self, pos + 1, left - v);
    }
  };
  if (m > 0) rec(rec, 0, n);
  return out;
}

inline double binomial_count(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t j = 1; j <= k; ++j) r = r * static_cast<double>(n - k + j) / static_cast<double>(j);
  return r;
}

// Pure profile where the first k_0 players use strategy 0, the next k_1 strategy 1, ...
inline std::vector<std::size_t> profile_from_counts(std::span<const std::size_t> counts) {
  std::vector<std::size_t> p;
  for (std::size_t s = 0; s < counts.size(); ++s) p.insert(p.end(), counts[s], s);
  return p;
}

// Pure equilibria of a symmetric game, as count vectors.
template <Model M>
std::vector<std::vector<std::size_t>> symmetric_pure_equilibria(const AtomicGame<M>& g, double tol = 1e-9, const AtomicOptions& opt = {}) {
  if (!g.symmetric()) throw ConfigurationError("symmetric_pure_equilibria needs a symmetric game");
  std::vector<std::vector<std::size_t>> out;
  for (const auto& k : compositions(g.size(), g.structure().strategy_count(g.type(0)))) {
    const auto prof = profile_from_counts(k);
    if (verify_equilibrium(g, pure_profile(g, std::span<const std::size_t>(prof)), opt).max_regret <= tol) out.push_back(k);
  }
  return out;
}

struct OptPoa {
  double opt = 0.0;
  double poa = 0.0;
  double pos = 0.0;
  bool opt_exact = false;
  std::vector<std::size_t> opt_profile;
  std::vector<double> esc;        // per supplied profile
  std::vector<bool> verified;     // per supplied profile
};

template <Model M>
OptPoa opt_and_poa(const AtomicGame<M>& g, const std::vector<MixedProfile>& equilibria, double pure_search_budget = 1e7,
                   double tol = 1e-9, const AtomicOptions& opt = {}) {
  OptPoa r;
  double worst = -std::numeric_limits<double>::infinity();
  double bestc = std::numeric_limits<double>::infinity();
  double family_min = std::numeric_limits<double>::infinity();
  for (const auto& p : equilibria) {
    const double c = esc(g, p, opt).value;
    const bool ok = verify_equilibrium(g, p, opt).max_regret <= tol;
    r.esc.push_back(c);
    r.verified.push_back(ok);
    family_min = std::min(family_min, c);
    if (ok) {
      worst = std::max(worst, c);
      bestc = std::min(bestc, c);
    }
  }
  if (!std::isfinite(worst)) throw FeasibilityError("opt_and_poa: no supplied profile verifies as an equilibrium");

  const auto& st = g.structure();
  r.opt = std::numeric_limits<double>::infinity();
  auto consider = [&](const std::vector<std::size_t>& choice) {
    const double c = esc(g, pure_profile(g, std::span<const std::size_t>(choice)), opt).value;
    if (c < r.opt) {
      r.opt = c;
      r.opt_profile = choice;
    }
  };
  if (g.size() > 0 && g.symmetric()) {
    const std::size_t m = st.strategy_count(g.type(0));
    if (binomial_count(g.size() + m - 1, m - 1) <= pure_search_budget) {
      for (const auto& k : compositions(g.size(), m)) consider(profile_from_counts(k));
      r.opt_exact = true;
    }
  } else {
    double space = 1.0;
    for (std::size_t i = 0; i < g.size(); ++i) space *= static_cast<double>(st.strategy_count(g.type(i)));
    if (space <= pure_search_budget) {
      std::vector<std::size_t> choice(g.size(), 0);
      for (;;) {
        consider(choice);
        std::size_t i = 0;
        while (i < g.size() && ++choice[i] == st.strategy_count(g.type(i))) choice[i++] = 0;
        if (i == g.size()) break;
      }
      r.opt_exact = true;
    }
  }
  // The expected social cost is multilinear in the mixed strategies, so its
  // minimum is attained at a pure profile; the family is only a fallback.
  if (!r.opt_exact) r.opt = family_min;
  if (!(r.opt > 0.0)) throw UndefinedRatioError("PoA undefined: Opt = 0");
  r.poa = worst / r.opt;
  r.pos = bestc / r.opt;
  return r;
}

}  // namespace cglab
