#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "cglab/discrete.hpp"
#include "cglab/envelope.hpp"
#include "cglab/errors.hpp"

namespace cglab {

inline constexpr double kFeasibilityTol = 1e-9;
inline constexpr double kDefaultTailTol = 1e-10;

// Weakly increasing, nonnegative resource cost. Affine and polynomial costs live
// on the reals; tables only on the integers; the Poisson-smoothed kind
//   c^(x) = E c(1 + X),  X ~ Poisson(x)
// is built from an integer-domain base and lives on the reals.
class CostFunction {
 public:
  struct Affine {
    double a = 0.0;
    double b = 0.0;
  };
  struct Polynomial {
    std::vector<double> coefficients;  // c(x) = sum_j coefficients[j] x^j
  };
  struct Table {
    std::vector<double> values;  // c(0..K)
    std::optional<GrowthEnvelope> envelope;
  };
  struct Poissonized {
    std::shared_ptr<const CostFunction> base;
    double tail_tol = kDefaultTailTol;
  };
  using Variant = std::variant<Affine, Polynomial, Table, Poissonized>;

  CostFunction() : v_(Affine{}) {}

  static CostFunction affine(double a, double b) {
    if (!(a >= 0.0) || !(b >= 0.0) || !std::isfinite(a) || !std::isfinite(b))
      throw DomainError("affine cost needs finite a >= 0 and b >= 0");
    return CostFunction(Affine{a, b});
  }

  static CostFunction constant(double b) { return affine(0.0, b); }

  static CostFunction polynomial(std::vector<double> coefficients) {
    if (coefficients.empty()) coefficients.push_back(0.0);
    for (double c : coefficients)
      if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("polynomial cost needs finite nonnegative coefficients");
    return CostFunction(Polynomial{std::move(coefficients)});
  }

  static CostFunction table(std::vector<double> values, std::optional<GrowthEnvelope> envelope = std::nullopt) {
    if (values.empty()) throw DomainError("table cost needs at least one value");
    for (std::size_t k = 0; k < values.size(); ++k) {
      if (!(values[k] >= 0.0) || !std::isfinite(values[k])) throw DomainError("table cost values must be finite and >= 0");
      if (k > 0 && values[k] < values[k - 1]) throw DomainError("table cost must be weakly increasing");
    }
    if (envelope) {
      if (envelope->kind == GrowthEnvelope::Kind::exponential && envelope->a < 0.0)
        throw DomainError("table envelope must be nondecreasing (a >= 0)");
      for (std::size_t k = 0; k < values.size(); ++k)
        if (values[k] > (*envelope)(static_cast<double>(k)) * (1.0 + 1e-12))
          throw DomainError("growth envelope does not dominate the table at k = " + std::to_string(k));
    }
    return CostFunction(Table{std::move(values), envelope});
  }

  static CostFunction poissonized(const CostFunction& base, double tail_tol = kDefaultTailTol) {
    if (!base.integer_domain()) throw DomainError("Poisson smoothing needs an integer-domain base cost");
    if (!(tail_tol > 0.0 && tail_tol < 1.0)) throw DomainError("tail_tol must lie in (0,1)");
    if (!base.envelope()) throw PrecisionError("Poisson smoothing needs a base cost with a growth envelope");
    return CostFunction(Poissonized{std::make_shared<const CostFunction>(base), tail_tol});
  }

  const Variant& variant() const { return v_; }
  bool is_affine() const { return std::holds_alternative<Affine>(v_); }
  bool is_polynomial() const { return std::holds_alternative<Polynomial>(v_); }
  bool is_table() const { return std::holds_alternative<Table>(v_); }
  bool is_poissonized() const { return std::holds_alternative<Poissonized>(v_); }

  bool continuous_domain() const { return !is_table(); }
  bool integer_domain() const { return !is_poissonized(); }

  const CostFunction& base() const {
    if (!is_poissonized()) throw DomainError("cost has no base");
    return *std::get<Poissonized>(v_).base;
  }
  double tail_tol() const { return is_poissonized() ? std::get<Poissonized>(v_).tail_tol : 0.0; }

  // Polynomial degree for affine/polynomial, nullopt otherwise.
  std::optional<int> degree() const {
    if (const auto* a = std::get_if<Affine>(&v_)) return a->a > 0.0 ? 1 : 0;
    if (const auto* p = std::get_if<Polynomial>(&v_)) {
      int d = 0;
      for (std::size_t j = 0; j < p->coefficients.size(); ++j)
        if (p->coefficients[j] > 0.0) d = static_cast<int>(j);
      return d;
    }
    return std::nullopt;
  }

  // Dominates c(k) for all integers k >= 0.
  std::optional<GrowthEnvelope> envelope() const {
    if (const auto* a = std::get_if<Affine>(&v_)) return GrowthEnvelope::polynomial(a->a > 0.0 ? 1 : 0, a->a + a->b);
    if (const auto* p = std::get_if<Polynomial>(&v_)) {
      double s = 0.0;
      for (double c : p->coefficients) s += c;
      return GrowthEnvelope::polynomial(*degree(), s);
    }
    if (const auto* t = std::get_if<Table>(&v_)) return t->envelope;
    return std::nullopt;
  }

  // Value on the integers.
  double at(std::int64_t k) const {
    if (k < 0) throw DomainError("cost evaluated at a negative load");
    if (const auto* t = std::get_if<Table>(&v_)) {
      if (k < static_cast<std::int64_t>(t->values.size())) return t->values[static_cast<std::size_t>(k)];
      if (!t->envelope) throw DomainError("table cost evaluated past its last entry without an envelope");
      return std::max(t->values.back(), (*t->envelope)(static_cast<double>(k)));
    }
    return (*this)(static_cast<double>(k));
  }

  // Value on the reals (tables accept integral arguments only).
  double operator()(double x) const {
    if (!(x >= 0.0)) throw DomainError("cost evaluated at a negative load");
    return std::visit(
        [&](const auto& c) -> double {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, Affine>) {
            return c.a * x + c.b;
          } else if constexpr (std::is_same_v<T, Polynomial>) {
            double r = 0.0;
            for (std::size_t j = c.coefficients.size(); j-- > 0;) r = r * x + c.coefficients[j];
            return r;
          } else if constexpr (std::is_same_v<T, Table>) {
            const double k = std::round(x);
            if (std::abs(k - x) > 1e-9) throw DomainError("table cost is only defined on the integers");
            return at(static_cast<std::int64_t>(k));
          } else {
            return smoothed(x, 0).value;
          }
        },
        v_);
  }

  // j-th derivative on the reals, j in {1, 2}.
  double derivative(double x, int j = 1) const {
    if (j < 1 || j > 2) throw DomainError("derivative order must be 1 or 2");
    if (!(x >= 0.0)) throw DomainError("cost evaluated at a negative load");
    return std::visit(
        [&](const auto& c) -> double {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, Affine>) {
            return j == 1 ? c.a : 0.0;
          } else if constexpr (std::is_same_v<T, Polynomial>) {
            double r = 0.0;
            for (std::size_t m = c.coefficients.size(); m-- > static_cast<std::size_t>(j);) {
              const double f = j == 1 ? static_cast<double>(m) : static_cast<double>(m * (m - 1));
              r = r * x + f * c.coefficients[m];
            }
            return r;
          } else if constexpr (std::is_same_v<T, Table>) {
            throw DomainError("table cost has no derivative on the reals");
          } else {
            return smoothed(x, j).value;
          }
        },
        v_);
  }

  // j-th forward difference on the integers.
  double difference(std::int64_t k, int j) const {
    if (j == 0) return at(k);
    return difference(k + 1, j - 1) - difference(k, j - 1);
  }

  // E[Delta^j c(1 + X)], X ~ Poisson(x), with a certified truncation error.
  Certified smoothed(double x, int j, std::optional<double> tol = std::nullopt) const {
    const auto& p = std::get<Poissonized>(v_);
    const CostFunction& base = *p.base;
    // |Delta^j c(m)| <= 2^j c(m + j) <= 2^j env(m + j) for increasing nonnegative c.
    const GrowthEnvelope env = base.envelope()->shifted(1.0 + j, std::ldexp(1.0, j));
    return poisson_expectation(x, [&](std::int64_t k) { return base.difference(1 + k, j); }, env, tol.value_or(p.tail_tol));
  }

 private:
  explicit CostFunction(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

// Resources with costs, types with explicit strategy sets (resource index lists).
class Structure {
 public:
  Structure() = default;

  Structure(std::vector<std::string> resource_ids, std::vector<CostFunction> costs, std::vector<std::string> type_ids,
            std::vector<std::vector<std::vector<std::size_t>>> strategies)
      : resource_ids_(std::move(resource_ids)), costs_(std::move(costs)), type_ids_(std::move(type_ids)), strategies_(std::move(strategies)) {
    validate();
  }

  // Builds from resource ids per strategy, as they appear in files.
  static Structure from_ids(std::vector<std::string> resource_ids, std::vector<CostFunction> costs, std::vector<std::string> type_ids,
                            const std::vector<std::vector<std::vector<std::string>>>& strategy_ids) {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t e = 0; e < resource_ids.size(); ++e)
      if (!index.emplace(resource_ids[e], e).second) throw StructuralError("duplicate resource id '" + resource_ids[e] + "'");
    std::vector<std::vector<std::vector<std::size_t>>> strategies(strategy_ids.size());
    for (std::size_t t = 0; t < strategy_ids.size(); ++t) {
      for (const auto& s : strategy_ids[t]) {
        std::vector<std::size_t> r;
        for (const auto& id : s) {
          auto it = index.find(id);
          if (it == index.end()) throw StructuralError("strategy references unknown resource '" + id + "'");
          r.push_back(it->second);
        }
        strategies[t].push_back(std::move(r));
      }
    }
    return Structure(std::move(resource_ids), std::move(costs), std::move(type_ids), std::move(strategies));
  }

  std::size_t resource_count() const { return resource_ids_.size(); }
  std::size_t type_count() const { return type_ids_.size(); }
  std::size_t strategy_count() const { return offsets_.back(); }
  std::size_t strategy_count(std::size_t t) const { return strategies_.at(t).size(); }

  const std::string& resource_id(std::size_t e) const { return resource_ids_.at(e); }
  const std::string& type_id(std::size_t t) const { return type_ids_.at(t); }
  const std::vector<std::string>& resource_ids() const { return resource_ids_; }
  const std::vector<std::string>& type_ids() const { return type_ids_; }

  std::size_t resource_index(const std::string& id) const {
    auto it = std::find(resource_ids_.begin(), resource_ids_.end(), id);
    if (it == resource_ids_.end()) throw StructuralError("unknown resource id '" + id + "'");
    return static_cast<std::size_t>(it - resource_ids_.begin());
  }

  std::size_t type_index(const std::string& id) const {
    auto it = std::find(type_ids_.begin(), type_ids_.end(), id);
    if (it == type_ids_.end()) throw StructuralError("unknown type id '" + id + "'");
    return static_cast<std::size_t>(it - type_ids_.begin());
  }

  const CostFunction& cost(std::size_t e) const { return costs_.at(e); }
  const std::vector<CostFunction>& costs() const { return costs_; }

  const std::vector<std::size_t>& strategy(std::size_t t, std::size_t s) const {
    if (t >= strategies_.size()) throw StructuralError("type index out of range");
    if (s >= strategies_[t].size()) throw StructuralError("strategy index out of range for type '" + type_ids_[t] + "'");
    return strategies_[t][s];
  }
  const std::vector<std::vector<std::size_t>>& strategies(std::size_t t) const { return strategies_.at(t); }

  // Flat index of (t, s) in flow vectors.
  std::size_t flat(std::size_t t, std::size_t s) const {
    strategy(t, s);
    return offsets_[t] + s;
  }
  std::size_t offset(std::size_t t) const { return offsets_.at(t); }

  bool contains(std::size_t t, std::size_t s, std::size_t e) const {
    const auto& r = strategy(t, s);
    return std::find(r.begin(), r.end(), e) != r.end();
  }

  // Largest strategy cardinality.
  std::size_t kappa() const {
    std::size_t k = 0;
    for (const auto& ss : strategies_)
      for (const auto& s : ss) k = std::max(k, s.size());
    return k;
  }

  Structure with_costs(std::vector<CostFunction> costs) const {
    return Structure(resource_ids_, std::move(costs), type_ids_, strategies_);
  }

 private:
  void validate() {
    if (costs_.size() != resource_ids_.size()) throw StructuralError("one cost function per resource is required");
    std::set<std::string> seen;
    for (const auto& id : resource_ids_)
      if (!seen.insert(id).second) throw StructuralError("duplicate resource id '" + id + "'");
    seen.clear();
    for (const auto& id : type_ids_)
      if (!seen.insert(id).second) throw StructuralError("duplicate type id '" + id + "'");
    if (strategies_.size() != type_ids_.size()) throw StructuralError("one strategy list per type is required");
    offsets_.assign(1, 0);
    for (std::size_t t = 0; t < strategies_.size(); ++t) {
      auto& ss = strategies_[t];
      if (ss.empty()) throw StructuralError("type '" + type_ids_[t] + "' has no strategies");
      for (auto& s : ss) {
        if (s.empty()) throw StructuralError("type '" + type_ids_[t] + "' has an empty strategy");
        for (std::size_t e : s)
          if (e >= resource_ids_.size()) throw StructuralError("strategy references an undeclared resource");
        std::sort(s.begin(), s.end());
        if (std::adjacent_find(s.begin(), s.end()) != s.end()) throw StructuralError("strategy lists a resource twice");
      }
      std::set<std::vector<std::size_t>> distinct(ss.begin(), ss.end());
      if (distinct.size() != ss.size()) throw StructuralError("type '" + type_ids_[t] + "' has duplicate strategies");
      offsets_.push_back(offsets_.back() + ss.size());
    }
  }

  std::vector<std::string> resource_ids_;
  std::vector<CostFunction> costs_;
  std::vector<std::string> type_ids_;
  std::vector<std::vector<std::vector<std::size_t>>> strategies_;
  std::vector<std::size_t> offsets_{0};
};

class DemandVector {
 public:
  DemandVector() = default;
  explicit DemandVector(std::vector<double> d) : d_(std::move(d)) {
    for (double v : d_)
      if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("demands must be finite and >= 0");
    total_ = std::accumulate(d_.begin(), d_.end(), 0.0);
  }
  std::size_t size() const { return d_.size(); }
  double operator[](std::size_t t) const { return d_.at(t); }
  double total() const { return total_; }
  const std::vector<double>& values() const { return d_; }

 private:
  std::vector<double> d_;
  double total_ = 0.0;
};

// y: flat flows per (type, strategy); x: loads per resource.
struct FlowLoadPair {
  std::vector<double> y;
  std::vector<double> x;
};

inline std::vector<double> loads_from_flows(const Structure& g, std::span<const double> y) {
  if (y.size() != g.strategy_count()) throw StructuralError("flow vector size does not match the strategy count");
  std::vector<double> x(g.resource_count(), 0.0);
  for (std::size_t t = 0; t < g.type_count(); ++t)
    for (std::size_t s = 0; s < g.strategy_count(t); ++s) {
      const double f = y[g.flat(t, s)];
      for (std::size_t e : g.strategy(t, s)) x[e] += f;
    }
  return x;
}

inline FlowLoadPair pair_from_flows(const Structure& g, std::vector<double> y) {
  FlowLoadPair p;
  p.x = loads_from_flows(g, y);
  p.y = std::move(y);
  return p;
}

// Largest violation among nonnegativity, demand and load-identity constraints.
inline double check_feasible(const Structure& g, const DemandVector& d, const FlowLoadPair& p) {
  if (p.y.size() != g.strategy_count() || p.x.size() != g.resource_count() || d.size() != g.type_count())
    throw StructuralError("flow/load/demand sizes do not match the structure");
  double v = 0.0;
  for (double f : p.y) v = std::max(v, -f);
  for (std::size_t t = 0; t < g.type_count(); ++t) {
    double s = 0.0;
    for (std::size_t k = 0; k < g.strategy_count(t); ++k) s += p.y[g.flat(t, k)];
    v = std::max(v, std::abs(s - d[t]));
  }
  const auto x = loads_from_flows(g, p.y);
  for (std::size_t e = 0; e < x.size(); ++e) v = std::max(v, std::abs(x[e] - p.x[e]));
  return v;
}

inline double strategy_cost(const Structure& g, std::span<const double> x, std::size_t t, std::size_t s) {
  if (x.size() != g.resource_count()) throw StructuralError("load vector size does not match the resource count");
  double c = 0.0;
  for (std::size_t e : g.strategy(t, s)) c += g.cost(e)(x[e]);
  return c;
}

inline double social_cost(const Structure& g, std::span<const double> x) {
  if (x.size() != g.resource_count()) throw StructuralError("load vector size does not match the resource count");
  double c = 0.0;
  for (std::size_t e = 0; e < x.size(); ++e)
    if (x[e] != 0.0) c += x[e] * g.cost(e)(x[e]);
  return c;
}

inline double social_cost(const Structure& g, const FlowLoadPair& p) { return social_cost(g, p.x); }

}  // namespace cglab
