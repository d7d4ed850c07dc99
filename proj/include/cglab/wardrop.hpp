#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "cglab/core.hpp"
#include "cglab/errors.hpp"

namespace cglab {

inline constexpr double kUsageThreshold = 1e-10;

struct WardropOptions {
  double target_eps = 1e-10;
  int max_iters = 20000;
  bool line_search = true;
  std::optional<std::vector<double>> initial_flows;
};

struct WardropSolution {
  FlowLoadPair pair;
  double epsilon = 0.0;
  int iterations = 0;
  double potential_value = 0.0;
  bool converged = false;
  std::vector<double> potential_trace;  // objective after each accepted iteration
};

struct SocialOptimumOptions {
  double target_gap = 1e-10;
  int max_iters = 20000;
  bool line_search = true;
  bool assume_convex = false;  // required for tables or smoothed costs
};

struct SocialOptimum {
  FlowLoadPair pair;
  double opt = 0.0;
  double gap = 0.0;  // certified: SC(pair) - Opt <= gap
  int iterations = 0;
  bool converged = false;
};

struct NonatomicPoa {
  double eq = 0.0;
  double opt = 0.0;
  double poa = 0.0;
};

namespace detail {

// 16-point Gauss-Legendre rule on [-1, 1].
inline const std::array<std::pair<double, double>, 16>& gauss_legendre16() {
  static const auto rule = [] {
    std::array<std::pair<double, double>, 16> r{};
    constexpr int n = 16;
    for (int i = 0; i < n; ++i) {
      double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = 0.0;
        for (int j = 1; j <= n; ++j) {
          const double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
        }
        dp = n * (z * p0 - p1) / (z * z - 1.0);
        const double dz = p0 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      r[static_cast<std::size_t>(i)] = {z, 2.0 / ((1.0 - z * z) * dp * dp)};
    }
    return r;
  }();
  return rule;
}

}  // namespace detail

// Integral of c over [0, x].
inline double cost_integral(const CostFunction& c, double x) {
  if (x <= 0.0) return 0.0;
  if (const auto* a = std::get_if<CostFunction::Affine>(&c.variant())) return 0.5 * a->a * x * x + a->b * x;
  if (const auto* p = std::get_if<CostFunction::Polynomial>(&c.variant())) {
    double r = 0.0;
    for (std::size_t j = p->coefficients.size(); j-- > 0;) r = r * x + p->coefficients[j] / static_cast<double>(j + 1);
    return r * x;
  }
  if (c.is_table()) throw DomainError("table costs have no integral on the reals");
  const int panels = 1 + static_cast<int>(std::ceil(x));
  const double h = x / panels;
  double r = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double mid = (k + 0.5) * h;
    for (const auto& [z, w] : detail::gauss_legendre16()) r += w * c(mid + 0.5 * h * z);
  }
  return 0.5 * h * r;
}

inline double beckmann_potential(const Structure& g, std::span<const double> x) {
  double r = 0.0;
  for (std::size_t e = 0; e < x.size(); ++e) r += cost_integral(g.cost(e), x[e]);
  return r;
}

namespace detail {

inline void require_continuous(const Structure& g) {
  for (std::size_t e = 0; e < g.resource_count(); ++e)
    if (!g.cost(e).continuous_domain())
      throw DomainError("resource '" + g.resource_id(e) + "' has an integer-only cost; nonatomic games need costs on the reals");
}

inline void require_demand(const Structure& g, const DemandVector& d) {
  if (d.size() != g.type_count()) throw StructuralError("demand vector size does not match the type count");
}

// Per-strategy sums of an edge function.
inline std::vector<double> strategy_sums(const Structure& g, std::span<const double> edge) {
  std::vector<double> c(g.strategy_count(), 0.0);
  for (std::size_t t = 0; t < g.type_count(); ++t)
    for (std::size_t s = 0; s < g.strategy_count(t); ++s) {
      double v = 0.0;
      for (std::size_t e : g.strategy(t, s)) v += edge[e];
      c[g.flat(t, s)] = v;
    }
  return c;
}

inline std::size_t argmin_strategy(const Structure& g, std::span<const double> c, std::size_t t) {
  std::size_t best = 0;
  for (std::size_t s = 1; s < g.strategy_count(t); ++s)
    if (c[g.flat(t, s)] < c[g.flat(t, best)]) best = s;
  return best;
}

// Convex flow objective given by its edge gradients g_e(x) (nondecreasing in x).
struct FlowObjective {
  std::function<double(std::size_t, double)> grad;
  std::function<double(std::span<const double>)> value;
  // Certificate measured on (y, strategy gradient sums); descent stops when <= target.
  std::function<double(std::span<const double>, std::span<const double>)> measure;
};

struct DescentResult {
  std::vector<double> y;
  double measure = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

// Minimizes phi(tau) = F(x + tau * dx) over [0, tau_max] by bisection on phi'.
inline double line_search(const FlowObjective& f, std::span<const double> x, std::span<const double> dx, double tau_max) {
  auto slope = [&](double tau) {
    double s = 0.0;
    for (std::size_t e = 0; e < x.size(); ++e)
      if (dx[e] != 0.0) s += f.grad(e, std::max(0.0, x[e] + tau * dx[e])) * dx[e];
    return s;
  };
  if (tau_max <= 0.0 || slope(0.0) >= 0.0) return 0.0;
  if (slope(tau_max) <= 0.0) return tau_max;
  double lo = 0.0, hi = tau_max;
  for (int it = 0; it < 200 && hi - lo > 1e-17 * tau_max; ++it) {
    const double mid = 0.5 * (lo + hi);
    (slope(mid) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

inline std::vector<double> edge_grads(const FlowObjective& f, std::span<const double> x) {
  std::vector<double> v(x.size());
  for (std::size_t e = 0; e < x.size(); ++e) v[e] = f.grad(e, x[e]);
  return v;
}

inline std::vector<double> all_or_nothing(const Structure& g, const DemandVector& d, std::span<const double> c) {
  std::vector<double> y(g.strategy_count(), 0.0);
  for (std::size_t t = 0; t < g.type_count(); ++t) y[g.flat(t, argmin_strategy(g, c, t))] = d[t];
  return y;
}

// Frank-Wolfe step followed by one pairwise step per type, which moves flow
// from the worst used strategy to the best one and can drop it to exactly zero.
inline DescentResult descend(const Structure& g, const DemandVector& d, const FlowObjective& f, std::vector<double> y, double target,
                             int max_iters, bool line_search_on) {
  DescentResult r;
  std::vector<double> x = loads_from_flows(g, y);
  double value = f.value(x);
  for (int k = 0;; ++k) {
    auto c = strategy_sums(g, edge_grads(f, x));
    r.measure = f.measure(y, c);
    if (r.measure <= target) {
      r.converged = true;
      break;
    }
    if (k >= max_iters) break;
    ++r.iterations;

    // Frank-Wolfe step toward the all-or-nothing response.
    const auto target_y = all_or_nothing(g, d, c);
    std::vector<double> dy(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) dy[i] = target_y[i] - y[i];
    const auto dx = loads_from_flows(g, dy);
    double tau = line_search_on ? line_search(f, x, dx, 1.0) : 2.0 / (k + 2.0);
    if (tau > 0.0) {
      std::vector<double> y2 = y, x2 = x;
      for (std::size_t i = 0; i < y.size(); ++i) y2[i] = std::max(0.0, y[i] + tau * dy[i]);
      x2 = loads_from_flows(g, y2);
      const double v2 = f.value(x2);
      if (line_search_on || v2 <= value) {
        y = std::move(y2);
        x = std::move(x2);
        value = v2;
      }
    }

    // Pairwise steps.
    for (std::size_t t = 0; t < g.type_count(); ++t) {
      c = strategy_sums(g, edge_grads(f, x));
      const std::size_t b = argmin_strategy(g, c, t);
      std::optional<std::size_t> a;
      for (std::size_t s = 0; s < g.strategy_count(t); ++s)
        if (y[g.flat(t, s)] > 0.0 && (!a || c[g.flat(t, s)] > c[g.flat(t, *a)])) a = s;
      if (!a || *a == b || c[g.flat(t, *a)] <= c[g.flat(t, b)]) continue;
      std::vector<double> px(x.size(), 0.0);
      for (std::size_t e : g.strategy(t, b)) px[e] += 1.0;
      for (std::size_t e : g.strategy(t, *a)) px[e] -= 1.0;
      const double cap = y[g.flat(t, *a)];
      const double step = line_search(f, x, px, cap);
      if (step <= 0.0) continue;
      if (step >= cap) {
        y[g.flat(t, b)] += cap;
        y[g.flat(t, *a)] = 0.0;
      } else {
        y[g.flat(t, b)] += step;
        y[g.flat(t, *a)] -= step;
      }
      x = loads_from_flows(g, y);
    }
    value = f.value(x);
    r.trace.push_back(value);
  }
  r.y = std::move(y);
  return r;
}

inline std::vector<double> initial_flows(const Structure& g, const DemandVector& d, const FlowObjective& f,
                                         const std::optional<std::vector<double>>& given) {
  if (given) {
    FlowLoadPair p = pair_from_flows(g, *given);
    if (check_feasible(g, d, p) > kFeasibilityTol * std::max(1.0, d.total()))
      throw FeasibilityError("initial flows are not feasible for the demand");
    return *given;
  }
  const std::vector<double> zero(g.resource_count(), 0.0);
  return all_or_nothing(g, d, strategy_sums(g, edge_grads(f, zero)));
}

}  // namespace detail

// Smallest eps with: every used strategy costs at most the cheapest alternative + eps.
inline double wardrop_epsilon(const Structure& g, const DemandVector& d, const FlowLoadPair& p) {
  detail::require_demand(g, d);
  const double v = check_feasible(g, d, p);
  if (v > kFeasibilityTol * std::max(1.0, d.total()))
    throw FeasibilityError("wardrop_epsilon: pair violates feasibility by " + std::to_string(v));
  std::vector<double> ce(g.resource_count());
  for (std::size_t e = 0; e < ce.size(); ++e) ce[e] = g.cost(e)(p.x[e]);
  const auto c = detail::strategy_sums(g, ce);
  double eps = 0.0;
  for (std::size_t t = 0; t < g.type_count(); ++t) {
    const double best = c[g.flat(t, detail::argmin_strategy(g, c, t))];
    for (std::size_t s = 0; s < g.strategy_count(t); ++s)
      if (p.y[g.flat(t, s)] > kUsageThreshold * d[t]) eps = std::max(eps, c[g.flat(t, s)] - best);
  }
  return eps;
}

inline WardropSolution solve_wardrop(const Structure& g, const DemandVector& d, const WardropOptions& opt = {}) {
  detail::require_demand(g, d);
  detail::require_continuous(g);
  if (!(opt.target_eps > 0.0)) throw DomainError("target_eps must be > 0");
  detail::FlowObjective f;
  f.grad = [&](std::size_t e, double x) { return g.cost(e)(x); };
  f.value = [&](std::span<const double> x) { return beckmann_potential(g, x); };
  f.measure = [&](std::span<const double> y, std::span<const double> c) {
    double eps = 0.0;
    for (std::size_t t = 0; t < g.type_count(); ++t) {
      const double best = c[g.flat(t, detail::argmin_strategy(g, c, t))];
      for (std::size_t s = 0; s < g.strategy_count(t); ++s)
        if (y[g.flat(t, s)] > kUsageThreshold * d[t]) eps = std::max(eps, c[g.flat(t, s)] - best);
    }
    return eps;
  };
  auto r = detail::descend(g, d, f, detail::initial_flows(g, d, f, opt.initial_flows), opt.target_eps, opt.max_iters, opt.line_search);
  WardropSolution sol;
  sol.pair = pair_from_flows(g, std::move(r.y));
  sol.epsilon = wardrop_epsilon(g, d, sol.pair);
  sol.converged = sol.epsilon <= opt.target_eps;
  sol.iterations = r.iterations;
  sol.potential_value = beckmann_potential(g, sol.pair.x);
  sol.potential_trace = std::move(r.trace);
  return sol;
}

inline SocialOptimum solve_social_optimum(const Structure& g, const DemandVector& d, const SocialOptimumOptions& opt = {}) {
  detail::require_demand(g, d);
  detail::require_continuous(g);
  for (std::size_t e = 0; e < g.resource_count(); ++e)
    if (!(g.cost(e).is_affine() || g.cost(e).is_polynomial()) && !opt.assume_convex)
      throw ConfigurationError("resource '" + g.resource_id(e) +
                               "': convexity of x*c(x) cannot be verified for this cost kind; set assume_convex if it holds, "
                               "otherwise use a grid search");
  detail::FlowObjective f;
  f.grad = [&](std::size_t e, double x) { return g.cost(e)(x) + x * g.cost(e).derivative(x, 1); };
  f.value = [&](std::span<const double> x) { return social_cost(g, x); };
  f.measure = [&](std::span<const double> y, std::span<const double> c) {
    double gap = 0.0;
    for (std::size_t t = 0; t < g.type_count(); ++t) {
      const double best = c[g.flat(t, detail::argmin_strategy(g, c, t))];
      for (std::size_t s = 0; s < g.strategy_count(t); ++s) gap += y[g.flat(t, s)] * (c[g.flat(t, s)] - best);
    }
    return gap;
  };
  auto r = detail::descend(g, d, f, detail::initial_flows(g, d, f, std::nullopt), opt.target_gap, opt.max_iters, opt.line_search);
  SocialOptimum so;
  so.pair = pair_from_flows(g, std::move(r.y));
  so.opt = social_cost(g, so.pair);
  so.gap = std::max(0.0, r.measure);
  so.converged = r.converged;
  so.iterations = r.iterations;
  return so;
}

inline NonatomicPoa poa_nonatomic(const Structure& g, const DemandVector& d, double target = 1e-12, bool assume_convex = false) {
  WardropOptions wo;
  wo.target_eps = target;
  const auto we = solve_wardrop(g, d, wo);
  if (!we.converged) throw PrecisionError("Wardrop solver did not reach the requested epsilon");
  SocialOptimumOptions so;
  so.target_gap = target;
  so.assume_convex = assume_convex;
  const auto o = solve_social_optimum(g, d, so);
  if (!o.converged) throw PrecisionError("social optimum solver did not reach the requested gap");
  NonatomicPoa r;
  r.eq = social_cost(g, we.pair);
  r.opt = o.opt;
  if (r.opt <= 0.0) throw UndefinedRatioError("PoA undefined: Opt = 0");
  r.poa = r.eq / r.opt;
  return r;
}

// Largest strategy cost when every resource carries load alpha.
inline double max_strategy_cost_at(const Structure& g, double alpha) {
  double c = 0.0;
  for (std::size_t t = 0; t < g.type_count(); ++t)
    for (std::size_t s = 0; s < g.strategy_count(t); ++s) {
      double v = 0.0;
      for (std::size_t e : g.strategy(t, s)) v += g.cost(e)(alpha);
      c = std::max(c, v);
    }
  return c;
}

inline double approx_we_distance_bound(double eps, double alpha, double beta) {
  if (!(beta > 0.0)) throw DomainError("beta must be > 0");
  if (!(eps >= 0.0) || !(alpha >= 0.0)) throw DomainError("eps and alpha must be >= 0");
  return std::sqrt(eps * alpha / beta);
}

inline double demand_perturbation_bound(double C, double beta, double l1_demand_gap) {
  if (!(beta > 0.0)) throw DomainError("beta must be > 0");
  if (!(C >= 0.0) || !(l1_demand_gap >= 0.0)) throw DomainError("C and the demand gap must be >= 0");
  if (l1_demand_gap == 0.0) return 0.0;
  return std::sqrt(2.0 * C / beta) * std::sqrt(l1_demand_gap);
}

}  // namespace cglab
