#pragma once
// Independent reference computations for the tests. Nothing here reuses the
// library's distribution code: outcomes are enumerated directly.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "cglab/atomic.hpp"
#include "cglab/core.hpp"
#include "cglab/wardrop.hpp"

namespace oracle {

using namespace cglab;

// Law of a sum of independent Bernoullis by walking all 2^n outcomes.
inline std::vector<double> bernoulli_sum_enumerated(const std::vector<double>& p) {
  const std::size_t n = p.size();
  std::vector<double> out(n + 1, 0.0);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    double pr = 1.0;
    int k = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1U) {
        pr *= p[i];
        ++k;
      } else {
        pr *= 1.0 - p[i];
      }
    }
    out[k] += pr;
  }
  return out;
}

// E h(X), X ~ Poisson(x), by plain summation to K terms in long double.
inline long double poisson_sum(double x, const std::function<long double(long)>& h, long K = 400) {
  long double p = std::exp(-static_cast<long double>(x));
  long double s = 0.0L;
  for (long k = 0; k <= K; ++k) {
    s += p * h(k);
    p *= static_cast<long double>(x) / static_cast<long double>(k + 1);
  }
  return s;
}

// Visits every joint outcome (strategy per player, presence per player) with
// its probability. Weighted games: everyone is present.
template <Model M, class F>
void for_each_outcome(const AtomicGame<M>& g, const MixedProfile& p, F&& visit) {
  const std::size_t n = g.size();
  std::vector<std::size_t> pick(n, 0);
  std::vector<int> present(n, 1);
  std::function<void(std::size_t, double)> rec = [&](std::size_t i, double pr) {
    if (pr == 0.0) return;
    if (i == n) {
      visit(pick, present, pr);
      return;
    }
    const std::size_t t = g.player(i).type;
    for (std::size_t s = 0; s < g.structure().strategy_count(t); ++s) {
      const double q = p.sigma[i][s];
      if (q == 0.0) continue;
      pick[i] = s;
      if constexpr (M == Model::bernoulli) {
        const double r = g.player(i).param;
        present[i] = 1;
        rec(i + 1, pr * q * r);
        present[i] = 0;
        if (r < 1.0) rec(i + 1, pr * q * (1.0 - r));
      } else {
        rec(i + 1, pr * q);
      }
    }
  };
  rec(0, 1.0);
}

template <Model M>
std::vector<double> realized_loads(const AtomicGame<M>& g, const std::vector<std::size_t>& pick, const std::vector<int>& present) {
  std::vector<double> x(g.structure().resource_count(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!present[i]) continue;
    const double w = M == Model::weighted ? g.player(i).param : 1.0;
    for (std::size_t e : g.structure().strategy(g.player(i).type, pick[i])) x[e] += w;
  }
  return x;
}

template <Model M>
double edge_cost(const AtomicGame<M>& g, std::size_t e, double x) {
  const auto& c = g.structure().cost(e);
  if constexpr (M == Model::bernoulli)
    return c.at(static_cast<std::int64_t>(std::llround(x)));
  else
    return c(x);
}

// E[sum_e X_e c_e(X_e)] over the full outcome space.
template <Model M>
double esc_brute(const AtomicGame<M>& g, const MixedProfile& p) {
  double total = 0.0;
  for_each_outcome(g, p, [&](const auto& pick, const auto& present, double pr) {
    const auto x = realized_loads(g, pick, present);
    double sc = 0.0;
    for (std::size_t e = 0; e < x.size(); ++e)
      if (x[e] > 0.0) sc += x[e] * edge_cost(g, e, x[e]);
    total += pr * sc;
  });
  return total;
}

// Expected cost of player i on strategy s given it is present, others random.
template <Model M>
double conditional_cost_brute(const AtomicGame<M>& g, const MixedProfile& p, std::size_t i, std::size_t s) {
  MixedProfile q = p;
  std::fill(q.sigma[i].begin(), q.sigma[i].end(), 0.0);
  q.sigma[i][s] = 1.0;
  double total = 0.0, mass = 0.0;
  for_each_outcome(g, q, [&](const auto& pick, const auto& present, double pr) {
    if (!present[i]) return;
    const auto x = realized_loads(g, pick, present);
    double c = 0.0;
    for (std::size_t e : g.structure().strategy(g.player(i).type, s)) c += edge_cost(g, e, x[e]);
    total += pr * c;
    mass += pr;
  });
  return total / mass;
}

inline WardropOptions tight(double eps) {
  WardropOptions o;
  o.target_eps = eps;
  return o;
}

// Seeded generator for property tests.
struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
  std::size_t index(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); }
  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }

  std::vector<double> probs(std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = uniform(lo, hi);
    return v;
  }

  std::vector<double> simplex(std::size_t m, double zero_prob = 0.3) {
    std::vector<double> v(m, 0.0);
    double s = 0.0;
    for (auto& x : v) {
      x = coin(zero_prob) ? 0.0 : uniform(0.05, 1.0);
      s += x;
    }
    if (s == 0.0) {
      v[index(0, m - 1)] = 1.0;
      return v;
    }
    for (auto& x : v) x /= s;
    return v;
  }

  // Monotone nonnegative cost; continuous kinds only when continuous is set.
  CostFunction cost(bool continuous) {
    const std::size_t kind = index(0, continuous ? 2 : 3);
    switch (kind) {
      case 0: return CostFunction::affine(uniform(0.1, 2.0), uniform(0.0, 1.0));
      case 1: return CostFunction::affine(0.0, uniform(0.2, 2.0));
      case 2: return CostFunction::polynomial({uniform(0.0, 1.0), uniform(0.0, 1.0), uniform(0.1, 1.0)});
      default: {
        std::vector<double> vals{0.0};
        for (int k = 1; k < 6; ++k) vals.push_back(vals.back() + uniform(0.0, 1.0));
        return CostFunction::table(vals, GrowthEnvelope::exponential(1.0, 10.0));
      }
    }
  }

  // Random structure: 2-4 resources, 1-2 types, 2-3 distinct strategies each.
  Structure structure(bool continuous) {
    const std::size_t E = index(2, 4);
    std::vector<std::string> rid;
    std::vector<CostFunction> costs;
    for (std::size_t e = 0; e < E; ++e) {
      rid.push_back("r" + std::to_string(e));
      costs.push_back(cost(continuous));
    }
    const std::size_t T = index(1, 2);
    std::vector<std::string> tid;
    std::vector<std::vector<std::vector<std::size_t>>> strategies;
    for (std::size_t t = 0; t < T; ++t) {
      tid.push_back("t" + std::to_string(t));
      const std::size_t want = index(2, 3);
      std::vector<std::vector<std::size_t>> ss;
      while (ss.size() < want) {
        std::vector<std::size_t> s;
        for (std::size_t e = 0; e < E; ++e)
          if (coin(0.4)) s.push_back(e);
        if (s.empty()) s.push_back(index(0, E - 1));
        if (std::find(ss.begin(), ss.end(), s) == ss.end()) ss.push_back(s);
      }
      strategies.push_back(std::move(ss));
    }
    return Structure(std::move(rid), std::move(costs), std::move(tid), std::move(strategies));
  }

  template <Model M>
  AtomicGame<M> game(std::size_t n) {
    Structure g = structure(M == Model::weighted);
    std::vector<typename AtomicGame<M>::Player> players;
    for (std::size_t i = 0; i < n; ++i) players.push_back({uniform(0.05, M == Model::weighted ? 1.0 : 0.95), index(0, g.type_count() - 1)});
    return AtomicGame<M>(std::move(g), std::move(players));
  }

  template <Model M>
  MixedProfile profile(const AtomicGame<M>& g) {
    MixedProfile p;
    for (std::size_t i = 0; i < g.size(); ++i) p.sigma.push_back(simplex(g.structure().strategy_count(g.player(i).type)));
    return p;
  }
};

}  // namespace oracle
