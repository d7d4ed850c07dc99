#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "cglab/atomic.hpp"
#include "cglab/core.hpp"
#include "cglab/discrete.hpp"
#include "cglab/instances.hpp"
#include "cglab/io.hpp"
#include "cglab/poisson_limit.hpp"
#include "cglab/wardrop.hpp"

namespace cglab {

// Equilibrium families a sequence run can draw from; the row uses their union.
enum class Selection {
  pure,               // best-response dynamics from everyone on strategy 0
  symmetric,          // shared mixed strategy
  pure_all,           // every pure equilibrium of a symmetric game
  wheatstone_family,  // mixed constructions on the bridge (strategy order upper, lower, zig-zag)
};

inline Selection parse_selection(const std::string& s) {
  if (s == "pure") return Selection::pure;
  if (s == "symmetric") return Selection::symmetric;
  if (s == "pure-all") return Selection::pure_all;
  if (s == "wheatstone-family") return Selection::wheatstone_family;
  throw UsageError("unknown equilibrium selection '" + s + "'");
}

inline const char* selection_name(Selection s) {
  switch (s) {
    case Selection::pure: return "pure";
    case Selection::symmetric: return "symmetric";
    case Selection::pure_all: return "pure-all";
    case Selection::wheatstone_family: return "wheatstone-family";
  }
  return "?";
}

struct SequenceSpec {
  std::string name;
  Structure structure;
  DemandVector demand;
  Model model = Model::weighted;
  std::vector<std::size_t> ns;
  std::vector<Selection> selections{Selection::symmetric};
  std::optional<double> alpha;
  double tail_tol = kDefaultTailTol;
  std::uint64_t seed = 0;
  double pure_search_budget = 1e6;
  double verify_tol = 1e-9;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct ConvergenceRow {
  std::size_t n = 0;
  Model model = Model::weighted;
  double max_param = 0.0;
  std::vector<double> loads;  // expected loads of the worst equilibrium found
  double l2 = std::numeric_limits<double>::quiet_NaN();
  TvInterval tv{std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  double bound = 0.0;
  bool bound_ok = false;
  double esc = std::numeric_limits<double>::quiet_NaN();
  double poa = std::numeric_limits<double>::quiet_NaN();
  double pos = std::numeric_limits<double>::quiet_NaN();
  double opt = std::numeric_limits<double>::quiet_NaN();
  bool opt_exact = false;
  std::size_t equilibria = 0;
  double max_regret = 0.0;
  bool ok = false;
  std::string note;
};

struct LimitSummary {
  std::vector<double> we_loads;
  double eq = 0.0;
  double opt = std::numeric_limits<double>::quiet_NaN();
  double poa = std::numeric_limits<double>::quiet_NaN();
  double we_epsilon = 0.0;
};

struct ConvergenceReport {
  std::string name;
  Model model = Model::weighted;
  std::vector<std::string> resource_ids;
  BoundConstants constants;
  LimitSummary limit;
  std::vector<ConvergenceRow> rows;

  bool all_ok() const {
    return std::all_of(rows.begin(), rows.end(), [](const ConvergenceRow& r) { return r.ok && r.bound_ok; });
  }
};

namespace detail {

template <class F>
void parallel_for(std::size_t count, unsigned threads, F&& body) {
  unsigned t = threads ? threads : std::max(1U, std::thread::hardware_concurrency());
  t = static_cast<unsigned>(std::min<std::size_t>(t, count));
  if (t <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < t; ++k)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) body(i);
    });
  for (auto& th : pool) th.join();
}

inline bool nonatomic_convex(const Structure& g) {
  for (std::size_t e = 0; e < g.resource_count(); ++e) {
    const auto& c = g.cost(e);
    const auto& b = c.is_poissonized() ? c.base() : c;
    if (!(b.is_affine() || b.is_polynomial())) return false;
  }
  return true;
}

}  // namespace detail

// Players per type: n each, with w_i (or r_i) = d_t / n.
template <Model M>
AtomicGame<M> generate_game(const Structure& g, const DemandVector& d, std::size_t n) {
  if (n == 0) throw DomainError("player count must be >= 1");
  std::vector<typename AtomicGame<M>::Player> p;
  for (std::size_t t = 0; t < g.type_count(); ++t)
    for (std::size_t k = 0; k < n; ++k) p.push_back({d[t] / static_cast<double>(n), t});
  return AtomicGame<M>(g, std::move(p));
}

// Mixed equilibria on the bridge. Bernoulli: k1 players on upper, k2 on lower,
// the other k3 mix upper/lower with q = (1 + (k2 - k1)/(k3 - 1))/2, which
// equalizes their costs when k3 - 1 > |k2 - k1|. Weighted: n-1 players on the
// zig-zag and one player mixing over all three paths.
template <Model M>
std::vector<MixedProfile> wheatstone_family(const AtomicGame<M>& g) {
  if (g.structure().type_count() != 1 || g.structure().strategy_count(0) != 3 || !g.symmetric())
    throw ConfigurationError("wheatstone family needs a symmetric single-type game with three strategies");
  const std::size_t n = g.size();
  std::vector<MixedProfile> out;
  const std::vector<double> up{1, 0, 0}, low{0, 1, 0}, zz{0, 0, 1};
  if constexpr (M == Model::bernoulli) {
    for (std::size_t k3 = 2; k3 <= n; ++k3)
      for (std::size_t k1 = 0; k1 + k3 <= n; ++k1) {
        const std::size_t k2 = n - k3 - k1;
        const double diff = static_cast<double>(k2) - static_cast<double>(k1);
        if (!(static_cast<double>(k3) - 1.0 > std::abs(diff))) continue;
        const double q = 0.5 * (1.0 + diff / (static_cast<double>(k3) - 1.0));
        MixedProfile p;
        p.sigma.insert(p.sigma.end(), k1, up);
        p.sigma.insert(p.sigma.end(), k2, low);
        p.sigma.insert(p.sigma.end(), k3, std::vector<double>{q, 1.0 - q, 0.0});
        out.push_back(std::move(p));
      }
  } else {
    MixedProfile p;
    p.sigma.assign(n - 1, zz);
    p.sigma.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    out.push_back(std::move(p));
  }
  return out;
}

template <Model M>
std::vector<MixedProfile> equilibrium_family(const AtomicGame<M>& g, const std::vector<Selection>& sel, const AtomicOptions& opt) {
  std::vector<MixedProfile> fam;
  for (Selection s : sel) {
    switch (s) {
      case Selection::pure: {
        const auto br = best_response_dynamics(g, std::vector<std::size_t>(g.size(), 0), 10000, TieBreak::keep_current, opt);
        if (br.converged) fam.push_back(pure_profile(g, std::span<const std::size_t>(br.profile)));
        break;
      }
      case Selection::symmetric: {
        auto r = symmetric_mixed_equilibrium(g, 1e-9, 0.5, opt);
        if (r.found) fam.push_back(std::move(r.profile));
        break;
      }
      case Selection::pure_all:
        for (const auto& k : symmetric_pure_equilibria(g, 1e-9, opt)) {
          const auto prof = profile_from_counts(k);
          fam.push_back(pure_profile(g, std::span<const std::size_t>(prof)));
        }
        break;
      case Selection::wheatstone_family:
        for (auto& p : wheatstone_family(g)) fam.push_back(std::move(p));
        break;
    }
  }
  return fam;
}

namespace detail {

template <Model M>
ConvergenceRow convergence_row(const SequenceSpec& spec, const BoundConstants& k, const LimitSummary& lim, std::size_t n) {
  ConvergenceRow row;
  row.n = n;
  row.model = M;
  const auto game = generate_game<M>(spec.structure, spec.demand, n);
  row.max_param = game.max_param();
  AtomicOptions opt;
  opt.seed = spec.seed;
  const auto fam = equilibrium_family(game, spec.selections, opt);
  if (fam.empty()) {
    row.note = "no equilibrium found";
    return row;
  }
  OptPoa op;
  try {
    op = opt_and_poa(game, fam, spec.pure_search_budget, spec.verify_tol, opt);
  } catch (const Error& e) {
    row.note = e.what();
    return row;
  }
  row.opt = op.opt;
  row.opt_exact = op.opt_exact;
  row.poa = op.poa;
  row.pos = op.pos;
  double gap = 0.0;
  const auto dn = game.demand();
  for (std::size_t t = 0; t < dn.size(); ++t) gap += std::abs(dn[t] - spec.demand[t]);
  const auto rb = rate_bounds(k, M, row.max_param, gap);
  row.bound = rb.with_gap;

  double worst = -1.0;
  double dist = 0.0;
  TvInterval tv{0.0, 0.0};
  for (std::size_t f = 0; f < fam.size(); ++f) {
    if (!op.verified[f]) continue;
    ++row.equilibria;
    row.max_regret = std::max(row.max_regret, verify_equilibrium(game, fam[f], opt).max_regret);
    if (op.esc[f] > worst) {
      worst = op.esc[f];
      row.loads = expected_loads(game, fam[f]);
    }
    for (std::size_t e = 0; e < spec.structure.resource_count(); ++e) {
      if constexpr (M == Model::weighted) {
        dist = std::max(dist, l2_distance(game, fam[f], e, lim.we_loads[e]));
      } else {
        const Pmf law = load_distribution(game, fam[f], e);
        const auto t = tv_distance(law, poisson_pmf(lim.we_loads[e], 1e-14));
        tv.lower = std::max(tv.lower, t.lower);
        tv.upper = std::max(tv.upper, t.upper);
      }
    }
  }
  row.esc = worst;
  if constexpr (M == Model::weighted) {
    row.l2 = dist;
    row.bound_ok = row.l2 <= row.bound;
  } else {
    row.tv = tv;
    row.bound_ok = row.tv.upper <= row.bound;
  }
  row.ok = row.equilibria > 0;
  return row;
}

}  // namespace detail

inline double default_alpha(const DemandVector& d) { return 1.5 * d.total(); }

inline LimitSummary solve_limit(const Structure& limit, const DemandVector& d) {
  LimitSummary s;
  WardropOptions wo;
  wo.target_eps = 1e-12;
  const auto we = solve_wardrop(limit, d, wo);
  s.we_loads = we.pair.x;
  s.we_epsilon = we.epsilon;
  s.eq = social_cost(limit, we.pair);
  try {
    SocialOptimumOptions so;
    so.target_gap = 1e-12;
    so.assume_convex = detail::nonatomic_convex(limit);
    const auto o = solve_social_optimum(limit, d, so);
    s.opt = o.opt;
    if (o.opt > 0.0) s.poa = s.eq / o.opt;
  } catch (const ConfigurationError&) {
    // Opt left undefined for costs whose x*c(x) convexity is unknown.
  }
  return s;
}

inline ConvergenceReport run_convergence(const SequenceSpec& spec) {
  ConvergenceReport rep;
  rep.name = spec.name;
  rep.model = spec.model;
  rep.resource_ids = spec.structure.resource_ids();
  const double alpha = spec.alpha.value_or(default_alpha(spec.demand));
  if (!(alpha > spec.demand.total())) throw ConfigurationError("alpha must exceed the total demand");
  const Structure limit = spec.model == Model::bernoulli ? build_limit_game(spec.structure, spec.tail_tol) : spec.structure;
  rep.limit = solve_limit(limit, spec.demand);
  rep.constants = regularity_constants_auto(spec.structure, alpha, spec.model);
  rep.rows.resize(spec.ns.size());
  detail::parallel_for(spec.ns.size(), spec.threads, [&](std::size_t i) {
    try {
      rep.rows[i] = spec.model == Model::weighted ? detail::convergence_row<Model::weighted>(spec, rep.constants, rep.limit, spec.ns[i])
                                                  : detail::convergence_row<Model::bernoulli>(spec, rep.constants, rep.limit, spec.ns[i]);
    } catch (const Error& e) {
      rep.rows[i].n = spec.ns[i];
      rep.rows[i].model = spec.model;
      rep.rows[i].note = e.what();
    }
  });
  return rep;
}

namespace detail {

inline std::string num(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline std::string report_csv(const ConvergenceReport& r) {
  std::ostringstream os;
  os << "n,model,max_w_or_r,loads,l2_dist,tv_lo,tv_hi,bound,bound_ok,esc,poa,pos\n";
  for (const auto& row : r.rows) {
    os << row.n << ',' << model_name(row.model) << ',' << detail::num(row.max_param) << ',';
    for (std::size_t e = 0; e < row.loads.size(); ++e) os << (e ? ";" : "") << detail::num(row.loads[e]);
    os << ',' << detail::num(row.l2) << ',' << detail::num(row.tv.lower) << ',' << detail::num(row.tv.upper) << ',' << detail::num(row.bound)
       << ',' << (row.bound_ok ? "true" : "false") << ',' << detail::num(row.esc) << ',' << detail::num(row.poa) << ','
       << detail::num(row.pos) << '\n';
  }
  return os.str();
}

inline nlohmann::json report_json(const ConvergenceReport& r) {
  using nlohmann::json;
  auto nz = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"n", row.n},
                    {"model", model_name(row.model)},
                    {"max_w_or_r", row.max_param},
                    {"loads", row.loads},
                    {"l2_dist", nz(row.l2)},
                    {"tv_lo", nz(row.tv.lower)},
                    {"tv_hi", nz(row.tv.upper)},
                    {"bound", row.bound},
                    {"bound_ok", row.bound_ok},
                    {"esc", nz(row.esc)},
                    {"opt", nz(row.opt)},
                    {"opt_exact", row.opt_exact},
                    {"poa", nz(row.poa)},
                    {"pos", nz(row.pos)},
                    {"equilibria", row.equilibria},
                    {"max_regret", row.max_regret},
                    {"ok", row.ok},
                    {"note", row.note}});
  }
  return {{"name", r.name},
          {"model", model_name(r.model)},
          {"resources", r.resource_ids},
          {"constants", io::constants_to_json(r.constants)},
          {"limit", {{"we_loads", r.limit.we_loads}, {"eq", r.limit.eq}, {"opt", nz(r.limit.opt)}, {"poa", nz(r.limit.poa)}}},
          {"rows", rows}};
}

struct OptRow {
  std::size_t n = 0;
  double opt_n = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::quiet_NaN();
  bool ok = false;
};

struct OptConvergence {
  double opt_limit = std::numeric_limits<double>::quiet_NaN();
  std::vector<OptRow> rows;
  bool monotone = false;  // |Opt_n - Opt_limit| nonincreasing over the rows
};

// Opt of the n-player games (aggregate-count enumeration) against the limit Opt.
inline OptConvergence opt_convergence(const SequenceSpec& spec) {
  OptConvergence r;
  const Structure limit = spec.model == Model::bernoulli ? build_limit_game(spec.structure, spec.tail_tol) : spec.structure;
  r.opt_limit = solve_limit(limit, spec.demand).opt;
  r.rows.resize(spec.ns.size());
  detail::parallel_for(spec.ns.size(), spec.threads, [&](std::size_t i) {
    OptRow& row = r.rows[i];
    row.n = spec.ns[i];
    auto run = [&](const auto& game) {
      if (!game.symmetric()) return;
      const std::size_t m = game.structure().strategy_count(0);
      if (binomial_count(game.size() + m - 1, m - 1) > spec.pure_search_budget) return;
      double best = std::numeric_limits<double>::infinity();
      for (const auto& k : compositions(game.size(), m)) {
        const auto prof = profile_from_counts(k);
        best = std::min(best, esc(game, pure_profile(game, std::span<const std::size_t>(prof))).value);
      }
      row.opt_n = best;
      row.gap = std::abs(best - r.opt_limit);
      row.ok = true;
    };
    if (spec.model == Model::weighted)
      run(generate_game<Model::weighted>(spec.structure, spec.demand, row.n));
    else
      run(generate_game<Model::bernoulli>(spec.structure, spec.demand, row.n));
  });
  r.monotone = std::all_of(r.rows.begin(), r.rows.end(), [](const OptRow& x) { return x.ok; });
  for (std::size_t i = 1; i < r.rows.size() && r.monotone; ++i)
    if (r.rows[i].gap > r.rows[i - 1].gap + 1e-12) r.monotone = false;
  return r;
}

// ---------------------------------------------------------------------------
// Worked examples against their closed forms.

struct Check {
  std::string label;
  double computed = 0.0;
  double expected = 0.0;
  double tol = 0.0;
  bool pass = false;
};

struct ExampleReport {
  std::string name;
  std::vector<Check> checks;
  bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }
  void add(std::string label, double computed, double expected, double tol) {
    checks.push_back({std::move(label), computed, expected, tol, std::abs(computed - expected) <= tol});
  }
};

inline double delta_weighted(std::size_t n) { return n % 2 ? 1.0 : 0.0; }
inline double delta_bernoulli(std::size_t n) { return n % 2 ? 1.0 / static_cast<double>(n) : 0.0; }

inline double wheatstone_weighted_poa(std::size_t n) {
  const double m = static_cast<double>(n);
  return 4 * m * m / (3 * m * m + delta_weighted(n));
}
// ESC/Opt of n-1 zig-zag players plus one on the upper path.
inline double wheatstone_weighted_zigzag_ratio(std::size_t n) {
  const double m = static_cast<double>(n);
  return (4 * m * m - 2 * m + 2) / (3 * m * m + delta_weighted(n));
}
// Best equilibrium is one player on each outer path, the rest on the zig-zag.
inline double wheatstone_weighted_pos(std::size_t n) {
  const double m = static_cast<double>(n);
  return (4 * m * m - 4 * m + 4) / (3 * m * m + delta_weighted(n));
}
inline double wheatstone_bernoulli_poa(std::size_t n) {
  const double m = static_cast<double>(n);
  return (5 * m - 1) / (5 * m - 2 + delta_bernoulli(n));
}

// Opt, PoA and PoS of the n-player bridge over its equilibrium family.
template <Model M>
OptPoa wheatstone_trajectory_point(std::size_t n) {
  const auto w = instances::wheatstone();
  const auto game = generate_game<M>(w.structure, w.demand, n);
  return opt_and_poa(game, equilibrium_family(game, {Selection::pure_all, Selection::wheatstone_family}, {}), 1e7);
}

inline ExampleReport reproduce_example(const std::string& name) {
  ExampleReport r;
  r.name = name;
  if (name == "wheatstone-weighted") {
    const auto w = instances::wheatstone();
    for (std::size_t n : {2, 3, 4, 5, 8, 16}) {
      const auto p = wheatstone_trajectory_point<Model::weighted>(n);
      const std::string tag = "n=" + std::to_string(n);
      r.add("PoA " + tag, p.poa, wheatstone_weighted_poa(n), 1e-9);
      r.add("PoS " + tag, p.pos, wheatstone_weighted_pos(n), 1e-9);
      if (n >= 3) {
        const auto g = generate_game<Model::weighted>(w.structure, w.demand, n);
        std::vector<std::size_t> prof(n, instances::kZigZag);
        prof[0] = instances::kUpper;
        r.add("ESC/Opt of (n-1 zig-zag, 1 upper) " + tag, esc(g, pure_profile(g, std::span<const std::size_t>(prof))).value / p.opt,
              wheatstone_weighted_zigzag_ratio(n), 1e-9);
      }
    }
    r.add("Opt n=4", wheatstone_trajectory_point<Model::weighted>(4).opt, 1.5, 1e-12);
    const auto g2 = generate_game<Model::weighted>(w.structure, w.demand, 2);
    const std::vector<std::size_t> split{instances::kUpper, instances::kLower};
    const auto ps = pure_profile(g2, std::span<const std::size_t>(split));
    r.add("n=2 split: player cost", conditional_expected_cost(g2, ps, 0, instances::kUpper).value, 1.5, 1e-12);
    r.add("n=2 split: regret", verify_equilibrium(g2, ps).max_regret, 0.0, 1e-12);
    const auto g5 = generate_game<Model::weighted>(w.structure, w.demand, 5);
    const std::vector<std::size_t> allzz(5, instances::kZigZag);
    r.add("all zig-zag: player cost", conditional_expected_cost(g5, pure_profile(g5, std::span<const std::size_t>(allzz)), 0, instances::kZigZag).value,
          2.0, 1e-12);
    const auto lim = solve_limit(w.structure, w.demand);
    const std::vector<double> x{1, 0, 1, 0, 1};
    for (std::size_t e = 0; e < 5; ++e) r.add("limit load " + w.structure.resource_id(e), lim.we_loads[e], x[e], 1e-9);
    r.add("limit PoA", lim.poa, 4.0 / 3.0, 1e-9);
  } else if (name == "wheatstone-bernoulli") {
    const auto w = instances::wheatstone();
    for (std::size_t n : {2, 3, 5, 10, 11}) {
      const auto p = wheatstone_trajectory_point<Model::bernoulli>(n);
      const std::string tag = "n=" + std::to_string(n);
      r.add("PoA " + tag, p.poa, wheatstone_bernoulli_poa(n), 1e-9);
      r.add("PoS " + tag, p.pos, 1.0, 0.0);
    }
    const std::size_t n = 10;
    const auto g = generate_game<Model::bernoulli>(w.structure, w.demand, n);
    const auto sym = symmetric_mixed_equilibrium(g);
    r.add("symmetric q on upper", sym.found ? sym.sigma[instances::kUpper] : -1.0, 0.5, 1e-12);
    r.add("symmetric per-player expected cost", expected_player_cost(g, sym.profile, 0), (5.0 * n - 1) / (2.0 * n * n), 1e-12);
    std::vector<std::size_t> half(n, instances::kUpper);
    std::fill(half.begin() + n / 2, half.end(), instances::kLower);
    const auto hp = pure_profile(g, std::span<const std::size_t>(half));
    r.add("half split per-player expected cost", expected_player_cost(g, hp, 0), (2.5 * n - 1) / (n * n), 1e-12);
    r.add("Opt n=10", wheatstone_trajectory_point<Model::bernoulli>(n).opt, 2.4, 1e-12);
    const auto lim = solve_limit(build_limit_game(w.structure), w.demand);
    const std::vector<double> x{0.5, 0.5, 0, 0.5, 0.5};
    for (std::size_t e = 0; e < 5; ++e) r.add("limit load " + w.structure.resource_id(e), lim.we_loads[e], x[e], 1e-9);
  } else if (name == "pigou") {
    const auto p = instances::pigou();
    r.add("PoA of the nonatomic game", poa_nonatomic(p.structure, p.demand).poa, 1.0, 1e-9);
    const auto lim = build_limit_game(p.structure);
    r.add("PoA of the smoothed limit game", poa_nonatomic(lim, p.demand, 1e-12, true).poa, 8.0 / 7.0, 1e-6);
    const auto we = solve_limit(lim, p.demand);
    r.add("limit load upper", we.we_loads[0], 1.0, 1e-9);
    r.add("limit load lower", we.we_loads[1], 0.0, 1e-9);
    for (std::size_t n : {5, 20}) {
      const auto g = generate_game<Model::bernoulli>(p.structure, p.demand, n);
      const auto s = symmetric_mixed_equilibrium(g);
      r.add("Bernoulli n=" + std::to_string(n) + ": symmetric q on upper", s.found ? s.sigma[0] : -1.0, 1.0, 0.0);
    }
  } else if (name == "parallel") {
    const auto p = instances::parallel();
    for (std::size_t n : {4, 16, 64}) {
      const std::string tag = "n=" + std::to_string(n);
      const auto gw = generate_game<Model::weighted>(p.structure, p.demand, n);
      const auto sw = symmetric_mixed_equilibrium(gw);
      r.add("weighted " + tag + ": q", sw.found ? sw.sigma[0] : -1.0, 0.5, 1e-12);
      r.add("weighted " + tag + ": L2 distance", l2_distance(gw, sw.profile, 0, 0.5), 0.5 / std::sqrt(static_cast<double>(n)), 1e-12);
      const auto gb = generate_game<Model::bernoulli>(p.structure, p.demand, n);
      const auto sb = symmetric_mixed_equilibrium(gb);
      r.add("Bernoulli " + tag + ": q", sb.found ? sb.sigma[0] : -1.0, 0.5, 1e-12);
      const Pmf law = load_distribution(gb, sb.profile, 0);
      std::vector<double> probs(n, 1.0 / (2.0 * static_cast<double>(n)));
      r.add("Bernoulli " + tag + ": load law is Binomial(n, 1/(2n))", tv_distance(law, bernoulli_sum_pmf(probs)).upper, 0.0, 1e-12);
    }
    const auto lim = solve_limit(p.structure, p.demand);
    r.add("limit load top", lim.we_loads[0], 0.5, 1e-9);
  } else {
    throw UsageError("unknown example '" + name + "' (wheatstone-weighted, wheatstone-bernoulli, pigou, parallel)");
  }
  return r;
}

// ---------------------------------------------------------------------------
// Sequence spec files.

// {"instance": "<built-in name or path>", "model": "weighted"|"bernoulli",
//  "n": [..] | {"from": a, "to": b}, "equilibria": [..], "alpha": x,
//  "tail_tol": x, "seed": k, "threads": k, "pure_search_budget": x}
inline SequenceSpec parse_sequence_spec(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
  io::check_keys(j, {"name", "instance", "model", "n", "equilibria", "alpha", "tail_tol", "seed", "threads", "pure_search_budget"}, "sequence spec");
  SequenceSpec s;
  const auto inst = io::required<std::string>(j, "instance", "sequence spec");
  s.name = j.value("name", inst);
  const auto names = instances::names();
  if (std::find(names.begin(), names.end(), inst) != names.end()) {
    auto b = instances::by_name(inst);
    s.structure = b.structure;
    s.demand = b.demand;
  } else {
    auto path = std::filesystem::path(inst);
    if (path.is_relative()) path = base_dir / path;
    auto parsed = io::parse_instance(io::read_json(path), path.string());
    s.structure = parsed.structure;
    s.demand = *parsed.demand;
  }
  const auto model = io::required<std::string>(j, "model", "sequence spec");
  if (model == "weighted")
    s.model = Model::weighted;
  else if (model == "bernoulli")
    s.model = Model::bernoulli;
  else
    throw StructuralError("sequence spec: model must be 'weighted' or 'bernoulli'");
  const auto& nj = io::required<nlohmann::json>(j, "n", "sequence spec");
  if (nj.is_array()) {
    s.ns = nj.get<std::vector<std::size_t>>();
  } else {
    io::check_keys(nj, {"from", "to"}, "sequence spec.n");
    for (auto k = io::required<std::size_t>(nj, "from", "n"); k <= io::required<std::size_t>(nj, "to", "n"); ++k) s.ns.push_back(k);
  }
  if (s.ns.empty()) throw StructuralError("sequence spec: empty n list");
  if (j.contains("equilibria")) {
    s.selections.clear();
    for (const auto& e : j.at("equilibria").get<std::vector<std::string>>()) s.selections.push_back(parse_selection(e));
  }
  if (j.contains("alpha")) s.alpha = j.at("alpha").get<double>();
  s.tail_tol = j.value("tail_tol", kDefaultTailTol);
  s.seed = j.value("seed", std::uint64_t{0});
  s.threads = j.value("threads", 0U);
  s.pure_search_budget = j.value("pure_search_budget", 1e6);
  if (const char* env = std::getenv("CGLAB_SEED")) {
    try {
      s.seed = std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError("CGLAB_SEED must be an unsigned integer");
    }
  }
  return s;
}

}  // namespace cglab
