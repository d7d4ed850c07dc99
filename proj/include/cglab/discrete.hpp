#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cglab/envelope.hpp"
#include "cglab/errors.hpp"

namespace cglab {

// Finite distribution on {offset, offset+1, ...} with an explicit bound on the
// mass that was cut off beyond the last stored point.
struct Pmf {
  std::int64_t offset = 0;
  std::vector<double> probs;
  double tail_mass = 0.0;
  // Set when the law is Poisson; lets expect_over certify tails.
  std::optional<double> poisson_mean;

  std::size_t size() const { return probs.size(); }

  double at(std::int64_t k) const {
    const std::int64_t i = k - offset;
    if (i < 0 || i >= static_cast<std::int64_t>(probs.size())) return 0.0;
    return probs[static_cast<std::size_t>(i)];
  }

  double total() const {
    double s = tail_mass;
    for (double p : probs) s += p;
    return s;
  }

  double mean() const {
    double m = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) m += static_cast<double>(offset + static_cast<std::int64_t>(k)) * probs[k];
    return m;
  }

  double variance() const {
    const double m = mean();
    double v = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
      const double d = static_cast<double>(offset + static_cast<std::int64_t>(k)) - m;
      v += d * d * probs[k];
    }
    return v;
  }

  static Pmf point_mass(std::int64_t k) {
    Pmf p;
    p.offset = k;
    p.probs = {1.0};
    return p;
  }
};

// Value with an absolute error bound: the true value lies in [value - error, value + error].
struct Certified {
  double value = 0.0;
  double error = 0.0;
  double lower() const { return value - error; }
  double upper() const { return value + error; }
};

namespace detail {

inline double log_poisson(double x, double k) {
  if (x == 0.0) return k == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return -x + k * std::log(x) - std::lgamma(k + 1.0);
}

// Bound on sum_{j >= k} g(j) P(X = j) for X ~ Poisson(x), given p_k = P(X = k).
// Uses the ratio g(j+1)p(j+1) / (g(j)p(j)) <= step_ratio(k) * x / (k+1).
inline std::optional<double> poisson_tail_bound(double x, std::int64_t k, double p_k, const GrowthEnvelope& g) {
  const double kd = static_cast<double>(k);
  const double q = g.step_ratio(kd) * x / (kd + 1.0);
  if (q >= 1.0) return std::nullopt;
  return g(kd) * p_k / (1.0 - q);
}

}  // namespace detail

// Poisson(x) truncated at the smallest K whose certified tail is below tail_tol.
inline Pmf poisson_pmf(double x, double tail_tol = 1e-10) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("poisson_pmf: mean must be finite and >= 0");
  if (!(tail_tol > 0.0 && tail_tol < 1.0)) throw DomainError("poisson_pmf: tail_tol must lie in (0,1)");
  Pmf pmf;
  pmf.poisson_mean = x;
  if (x == 0.0) {
    pmf.probs = {1.0};
    return pmf;
  }
  const GrowthEnvelope unit = GrowthEnvelope::polynomial(0, 1.0);
  for (std::int64_t k = 0;; ++k) {
    pmf.probs.push_back(std::exp(detail::log_poisson(x, static_cast<double>(k))));
    const double next = std::exp(detail::log_poisson(x, static_cast<double>(k + 1)));
    const auto bound = detail::poisson_tail_bound(x, k + 1, next, unit);
    if (bound && *bound < tail_tol) break;
  }
  // Remainder summed directly until terms stop mattering.
  const auto K = static_cast<std::int64_t>(pmf.probs.size());
  double tail = 0.0;
  for (std::int64_t j = K;; ++j) {
    const double t = std::exp(detail::log_poisson(x, static_cast<double>(j)));
    tail += t;
    if (static_cast<double>(j) > x && (t == 0.0 || t < 1e-20 * tail)) break;
  }
  pmf.tail_mass = tail;
  return pmf;
}

// Exact law of a sum of independent Bernoulli(p_i) by sequential convolution.
inline Pmf bernoulli_sum_pmf(std::span<const double> probs) {
  for (double p : probs)
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("bernoulli_sum_pmf: probabilities must lie in [0,1]");
  std::vector<double> f(probs.size() + 1, 0.0);
  f[0] = 1.0;
  std::size_t m = 0;
  for (double p : probs) {
    if (p == 0.0) continue;
    ++m;
    for (std::size_t k = m; k > 0; --k) f[k] = f[k] * (1.0 - p) + f[k - 1] * p;
    f[0] *= 1.0 - p;
  }
  f.resize(m + 1);
  Pmf pmf;
  pmf.probs = std::move(f);
  return pmf;
}

// Splittable counter-based generator: output k of stream s under seed is a pure
// function of (seed, s, k).
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(mix(seed ^ 0x243F6A8885A308D3ULL) ^ mix(stream + 0x13198A2E03707344ULL)) {}

  std::uint64_t next_u64() { return mix(key_ + 0x9E3779B97F4A7C15ULL * ++counter_); }

  // Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Point masses on the reals, sorted by value.
struct WeightedDistribution {
  std::vector<double> values;
  std::vector<double> masses;
  bool exact = true;
  std::size_t samples = 0;  // > 0 for empirical distributions

  double mean() const {
    double m = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) m += values[i] * masses[i];
    return m;
  }

  double variance() const {
    const double m = mean();
    double v = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) v += (values[i] - m) * (values[i] - m) * masses[i];
    return v;
  }

  double mass_at(double v, double tol = 1e-12) const {
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
      if (std::abs(values[i] - v) <= tol) s += masses[i];
    return s;
  }
};

struct MonteCarlo {
  std::uint64_t seed = 0;
  std::size_t samples = 1'000'000;
  std::uint64_t stream = 0;
};

inline constexpr std::size_t kExactEnumerationLimit = 20;

namespace detail {

// Sort by value and merge neighbours closer than tol into the first of the run.
inline WeightedDistribution merge_points(std::vector<std::pair<double, double>> pts, double tol = 1e-12) {
  std::sort(pts.begin(), pts.end());
  WeightedDistribution d;
  for (const auto& [v, m] : pts) {
    if (!d.values.empty() && std::abs(v - d.values.back()) <= tol) {
      d.masses.back() += m;
    } else {
      d.values.push_back(v);
      d.masses.push_back(m);
    }
  }
  return d;
}

}  // namespace detail

inline void check_weighted_inputs(std::span<const double> weights, std::span<const double> probs) {
  if (weights.size() != probs.size()) throw StructuralError("weighted_sum_distribution: weights and probs differ in length");
  for (double w : weights)
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("weighted_sum_distribution: weights must be finite and >= 0");
  for (double p : probs)
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("weighted_sum_distribution: probabilities must lie in [0,1]");
}

// Exact law of sum_i w_i Bern(p_i) for n <= 20.
inline WeightedDistribution weighted_sum_distribution(std::span<const double> weights, std::span<const double> probs) {
  check_weighted_inputs(weights, probs);
  if (weights.size() > kExactEnumerationLimit)
    throw CapacityError("weighted_sum_distribution: exact mode limited to 20 players; use Monte Carlo");
  std::vector<std::pair<double, double>> pts{{0.0, 1.0}};
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double p = probs[i];
    if (p == 0.0) continue;
    std::vector<std::pair<double, double>> next;
    next.reserve(pts.size() * 2);
    for (const auto& [v, m] : pts) {
      if (p < 1.0) next.emplace_back(v, m * (1.0 - p));
      next.emplace_back(v + weights[i], m * p);
    }
    auto merged = detail::merge_points(std::move(next), 0.0);
    pts.clear();
    for (std::size_t k = 0; k < merged.values.size(); ++k) pts.emplace_back(merged.values[k], merged.masses[k]);
  }
  return detail::merge_points(std::move(pts));
}

// Empirical law from mc.samples independent draws; reproducible from (seed, stream).
inline WeightedDistribution weighted_sum_distribution(std::span<const double> weights, std::span<const double> probs, const MonteCarlo& mc) {
  check_weighted_inputs(weights, probs);
  if (mc.samples == 0) throw ConfigurationError("Monte Carlo needs at least one sample");
  CounterRng rng(mc.seed, mc.stream);
  std::vector<double> draws(mc.samples);
  for (auto& x : draws) {
    double s = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i)
      if (rng.uniform() < probs[i]) s += weights[i];
    x = s;
  }
  std::vector<std::pair<double, double>> pts;
  pts.reserve(draws.size());
  const double m = 1.0 / static_cast<double>(mc.samples);
  for (double x : draws) pts.emplace_back(x, m);
  auto d = detail::merge_points(std::move(pts));
  d.exact = false;
  d.samples = mc.samples;
  return d;
}

struct TvInterval {
  double lower = 0.0;
  double upper = 0.0;
};

// TV on N; stored tails are unknown mass, so the result is an interval.
inline TvInterval tv_distance(const Pmf& P, const Pmf& Q) {
  const std::int64_t lo = std::min(P.offset, Q.offset);
  const std::int64_t hi = std::max(P.offset + static_cast<std::int64_t>(P.size()), Q.offset + static_cast<std::int64_t>(Q.size()));
  double s = 0.0;
  for (std::int64_t k = lo; k < hi; ++k) s += std::abs(P.at(k) - Q.at(k));
  const double t = P.tail_mass + Q.tail_mass;
  TvInterval r;
  r.lower = std::clamp(0.5 * (s - t), 0.0, 1.0);
  r.upper = std::clamp(0.5 * (s + t), 0.0, 1.0);
  return r;
}

struct PoissonTvBound {
  double tight = 0.0;   // 1 - exp(-|x-y|)
  double linear = 0.0;  // |x-y|
};

inline PoissonTvBound tv_poisson_bound(double x, double y) {
  if (!(x >= 0.0) || !(y >= 0.0)) throw DomainError("tv_poisson_bound: means must be >= 0");
  const double d = std::abs(x - y);
  return {-std::expm1(-d), d};
}

struct BarbourHall {
  double bound = 0.0;
  double max_p = 0.0;
};

inline BarbourHall barbour_hall_bound(std::span<const double> probs) {
  double x = 0.0;
  double sq = 0.0;
  double mp = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("barbour_hall_bound: probabilities must lie in [0,1]");
    x += p;
    sq += p * p;
    mp = std::max(mp, p);
  }
  if (x == 0.0) return {0.0, mp};
  return {-std::expm1(-x) / x * sq, mp};
}

inline double borisov_ruzankin_bound(double x, double nu, double p) {
  if (!(p >= 0.0) || p >= 1.0) throw DomainError("borisov_ruzankin_bound: p must lie in [0,1)");
  if (!(x >= 0.0) || !(nu >= 0.0)) throw DomainError("borisov_ruzankin_bound: x and nu must be >= 0");
  return 0.5 * x * nu * p * std::exp(p) / ((1.0 - p) * (1.0 - p));
}

// E h(K) for K ~ dist. When the pmf carries a tail, |h| must be dominated by an
// envelope and the law must be Poisson so the cut-off part can be bounded.
inline Certified expect_over(const Pmf& dist, const std::function<double(std::int64_t)>& h, const GrowthEnvelope* envelope = nullptr) {
  Certified r;
  for (std::size_t k = 0; k < dist.size(); ++k) {
    if (dist.probs[k] == 0.0) continue;
    r.value += h(dist.offset + static_cast<std::int64_t>(k)) * dist.probs[k];
  }
  if (dist.tail_mass > 0.0) {
    if (envelope == nullptr || !dist.poisson_mean)
      throw PrecisionError("expect_over: truncated distribution needs a Poisson tag and a growth envelope");
    const double x = *dist.poisson_mean;
    const std::int64_t K1 = dist.offset + static_cast<std::int64_t>(dist.size());
    const double pk = std::exp(detail::log_poisson(x, static_cast<double>(K1)));
    const auto bound = detail::poisson_tail_bound(x, K1, pk, *envelope);
    if (!bound) throw PrecisionError("expect_over: envelope grows too fast to certify the tail");
    r.error = *bound;
  }
  return r;
}

// E h(X), X ~ Poisson(x), summed until the envelope tail bound drops below tol.
inline Certified poisson_expectation(double x, const std::function<double(std::int64_t)>& h, const GrowthEnvelope& envelope, double tol) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("poisson_expectation: mean must be finite and >= 0");
  if (!(tol > 0.0)) throw DomainError("poisson_expectation: tolerance must be > 0");
  if (x == 0.0) return {h(0), 0.0};
  Certified r;
  constexpr std::int64_t kMaxTerms = 1'000'000;
  for (std::int64_t k = 0; k < kMaxTerms; ++k) {
    const double p = std::exp(detail::log_poisson(x, static_cast<double>(k)));
    if (p > 0.0) r.value += h(k) * p;
    if (static_cast<double>(k) + 1.0 < x) continue;
    const double pn = std::exp(detail::log_poisson(x, static_cast<double>(k + 1)));
    const auto bound = detail::poisson_tail_bound(x, k + 1, pn, envelope);
    if (bound && *bound < tol) {
      r.error = *bound;
      return r;
    }
  }
  throw PrecisionError("poisson_expectation: tail bound did not fall below tolerance");
}

}  // namespace cglab
