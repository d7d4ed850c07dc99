#include <gtest/gtest.h>

#include <cmath>

#include "cglab/harness.hpp"
#include "cglab/instances.hpp"
#include "cglab/poisson_limit.hpp"
#include "oracles.hpp"

using namespace cglab;

namespace {

double fd(const CostFunction& c, double x, double h = 1e-5) { return (c(x + h) - c(x - h)) / (2 * h); }

}  // namespace

TEST(AuxCost, Examples) {
  const auto lin = make_aux_cost(CostFunction::affine(1, 0));
  for (int i = 0; i <= 99; ++i) {
    const double x = 3.0 * i / 99.0;
    EXPECT_NEAR(aux_cost_eval(lin, x).value, 1.0 + x, 1e-10);
  }
  const auto cst = make_aux_cost(CostFunction::constant(2.5));
  const auto cv = aux_cost_eval(cst, 0.7);
  EXPECT_LE(std::abs(cv.value - 2.5), cv.error);
  EXPECT_LT(cv.error, cst.tail_tol());
  const auto sq = make_aux_cost(CostFunction::polynomial({0, 0, 1}));
  // E (1+X)^2 = 1 + 3x + x^2.
  EXPECT_NEAR(aux_cost_eval(sq, 1.0).value, 5.0, 1e-10);
  EXPECT_NEAR(aux_cost_eval(sq, 2.5).value, 1 + 7.5 + 6.25, 1e-9);
  EXPECT_THROW(aux_cost_eval(CostFunction::affine(1, 0), 1.0), DomainError);
}

TEST(AuxCost, DerivativeExamples) {
  const auto lin = make_aux_cost(CostFunction::affine(2, 1));
  EXPECT_NEAR(aux_cost_derivative(lin, 0.4, 1).value, 2.0, 1e-12);
  EXPECT_NEAR(aux_cost_derivative(lin, 0.4, 2).value, 0.0, 1e-12);
  const auto sq = make_aux_cost(CostFunction::polynomial({0, 0, 1}));
  EXPECT_NEAR(aux_cost_derivative(sq, 0.7, 1).value, 3 + 2 * 0.7, 1e-10);
  EXPECT_NEAR(aux_cost_derivative(sq, 0.7, 2).value, 2.0, 1e-10);
  EXPECT_THROW(aux_cost_derivative(sq, 0.7, 3), DomainError);
}

TEST(AuxCost, DerivativeMatchesFiniteDifferences) {
  oracle::Gen gen(2718);
  std::vector<double> vals{0.0};
  for (int k = 1; k < 8; ++k) vals.push_back(vals.back() + gen.uniform(0.0, 1.0));
  const std::vector<CostFunction> bases{CostFunction::affine(1.5, 0.2), CostFunction::polynomial({0.3, 0.5, 0.8}),
                                        CostFunction::table(vals, GrowthEnvelope::exponential(1.0, 10.0))};
  for (const auto& b : bases) {
    const auto aux = make_aux_cost(b, 1e-13);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const double x = 0.05 + 2.95 * i / 49.0;
      worst = std::max(worst, std::abs(aux_cost_derivative(aux, x, 1).value - fd(aux, x)));
    }
    EXPECT_LE(worst, 1e-6);
  }
}

TEST(AuxCost, SlopePositiveAndBelowZeta) {
  oracle::Gen gen(99);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> vals{0.0, 0.0};
    for (int k = 2; k < 7; ++k) vals.push_back(vals.back() + gen.uniform(0.0, 0.5));
    vals[3] += 0.1;  // nonconstant on k >= 1
    for (std::size_t k = 4; k < vals.size(); ++k) vals[k] += 0.1;
    const auto c = CostFunction::table(vals, GrowthEnvelope::exponential(1.0, 10.0));
    const double alpha = 2.0;
    const Structure g = Structure::from_ids({"a"}, {c}, {"t"}, {{{"a"}}});
    ConstantOverrides ov;
    ov.beta = 1.0;
    const auto k = regularity_constants(g, alpha, Model::bernoulli, ov);
    const auto aux = make_aux_cost(c, 1e-13);
    for (int i = 0; i < 100; ++i) {
      const double x = alpha * i / 99.0;
      const auto d = aux_cost_derivative(aux, x, 1);
      EXPECT_GT(d.lower(), 0.0) << x;
      EXPECT_LE(d.value, k.zeta + 1e-12) << x;
    }
  }
}

TEST(Constants, Affine) {
  const Structure g = Structure::from_ids({"a", "b"}, {CostFunction::affine(0.7, 1), CostFunction::affine(0.7, 0)}, {"t"}, {{{"a"}, {"b"}}});
  const auto k = regularity_constants(g, 1.5, Model::bernoulli);
  EXPECT_NEAR(k.nu, 0.0, 1e-12);
  EXPECT_NEAR(k.zeta, 0.7, 1e-10);
  EXPECT_NEAR(k.beta, 0.7, 1e-15);
  EXPECT_EQ(k.beta_source, "affine slope");
}

TEST(Constants, Wheatstone) {
  const auto w = instances::wheatstone();
  const auto k = regularity_constants_auto(w.structure, 2.0, Model::bernoulli);
  EXPECT_NEAR(k.nu, 0.0, 1e-12);
  EXPECT_NEAR(k.zeta, 1.0, 1e-10);
  EXPECT_EQ(k.kappa, 3U);
  EXPECT_NEAR(k.C, 6.0, 1e-9);
  EXPECT_NEAR(k.beta, 0.25, 1e-6);
  EXPECT_THROW(regularity_constants(w.structure, 2.0, Model::bernoulli), ConfigurationError);
}

TEST(Constants, SquareCost) {
  const Structure g = Structure::from_ids({"a"}, {CostFunction::polynomial({0, 0, 1})}, {"t"}, {{{"a"}}});
  const auto k = regularity_constants(g, 1.0, Model::bernoulli);
  EXPECT_NEAR(k.nu, 2.0, 1e-9);
  EXPECT_NEAR(k.zeta, std::expm1(1.0) * 2.0 + 3.0, 1e-9);
}

TEST(Constants, WeightedNeedsDeclaredConstantsForTables) {
  const Structure g = Structure::from_ids({"a"}, {CostFunction::table({0, 1, 2}, GrowthEnvelope::polynomial(1, 1))}, {"t"}, {{{"a"}}});
  EXPECT_THROW(regularity_constants(g, 1.0, Model::weighted), ConfigurationError);
  ConstantOverrides ov;
  ov.beta = 1;
  ov.gamma = 0;
  ov.zeta = 1;
  EXPECT_NO_THROW(regularity_constants(g, 1.0, Model::weighted, ov));
}

TEST(Lambda, Examples) {
  BoundConstants k;
  k.zeta = 1.0;
  EXPECT_NEAR(lambda_bound(k, 0.1), 0.1, 1e-15);
  k.alpha = 1.0;
  k.nu = 2.0;
  k.zeta = 0.5;
  double prev = 0.0;
  for (double r = 0.05; r < 0.95; r += 0.05) {
    const double v = lambda_bound(k, r);
    EXPECT_NEAR(v, r * std::exp(r) / ((1 - r) * (1 - r)) + 0.5 * r, 1e-12);
    EXPECT_GT(v, prev);
    prev = v;
  }
  EXPECT_THROW(lambda_bound(k, 1.0), DomainError);
}

TEST(RateBounds, PigouSubstitution) {
  const auto p = instances::pigou();
  ConstantOverrides ov;
  ov.beta = 1.0;
  const auto k = regularity_constants(p.structure, 1.5, Model::bernoulli, ov);
  EXPECT_NEAR(k.theta_hat, std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(rate_bounds(k, Model::bernoulli, 0.1).base, 0.1 + std::sqrt(0.3), 1e-12);
  EXPECT_NEAR(rate_bounds(k, Model::bernoulli, 0.1).base, 0.6477, 5e-5);
  EXPECT_EQ(rate_bounds(k, Model::bernoulli, 0.0).base, 0.0);
  EXPECT_THROW(rate_bounds(k, Model::weighted, 0.1), ConfigurationError);
}

TEST(RateBounds, WeightedVanishesWithWeight) {
  const auto w = instances::parallel(CostFunction::polynomial({0, 1, 1}));
  const auto k = regularity_constants(w.structure, 1.5, Model::weighted);
  EXPECT_EQ(rate_bounds(k, Model::weighted, 0.0).base, 0.0);
  EXPECT_LT(rate_bounds(k, Model::weighted, 1e-8).base, 1e-3);
  EXPECT_GT(rate_bounds(k, Model::weighted, 0.1, 0.01).with_gap, rate_bounds(k, Model::weighted, 0.1).base);
}

TEST(PolyPoaBound, Examples) {
  EXPECT_NEAR(poa_polynomial_bound(1), 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(poa_polynomial_bound(2), 3 * std::sqrt(3.0) / (3 * std::sqrt(3.0) - 2), 1e-14);
  EXPECT_NEAR(poa_polynomial_bound(2), 1.6258, 1e-4);
  for (int d = 1; d < 8; ++d) EXPECT_LT(poa_polynomial_bound(d), poa_polynomial_bound(d + 1));
  EXPECT_THROW(poa_polynomial_bound(0), DomainError);
}

TEST(LimitGame, Examples) {
  const auto w = instances::wheatstone();
  const auto lim = build_limit_game(w.structure);
  const auto s = solve_wardrop(lim, w.demand);
  EXPECT_NEAR(s.pair.y[instances::kUpper], 0.5, 1e-6);
  EXPECT_NEAR(s.pair.y[instances::kLower], 0.5, 1e-6);
  EXPECT_NEAR(strategy_cost(lim, s.pair.x, 0, instances::kUpper), 2.5, 1e-6);
  EXPECT_NEAR(strategy_cost(lim, s.pair.x, 0, instances::kZigZag), 3.0, 1e-6);
  const auto c = instances::parallel(CostFunction::constant(1.5), 2.0);
  const auto lc = build_limit_game(c.structure);
  EXPECT_NEAR(social_cost(lc, solve_wardrop(lc, c.demand).pair), 3.0, 2 * 1e-10 * 2.0);
  const auto cont = instances::parallel(CostFunction::affine(1, 0));
  const auto tab = Structure::from_ids({"a"}, {CostFunction::table({0, 1})}, {"t"}, {{{"a"}}});
  EXPECT_THROW(build_limit_game(tab), PrecisionError);
  EXPECT_THROW(build_limit_game(lim), DomainError);
}

// |E c(1 + Z_{i,e}) - c^(x_e)| <= Lambda(r) for every player and edge at the
// symmetric equilibrium of the Bernoulli Wheatstone game.
TEST(Lambda, DominatesPerEdgeGaps) {
  const auto w = instances::wheatstone();
  for (std::size_t n : {4, 10, 20}) {
    const auto g = generate_game<Model::bernoulli>(w.structure, w.demand, n);
    const auto eq = symmetric_mixed_equilibrium(g);
    ASSERT_TRUE(eq.found);
    const auto k = regularity_constants_auto(w.structure, 1.5, Model::bernoulli);
    const double r = 1.0 / static_cast<double>(n);
    const auto x = expected_loads(g, eq.profile);
    const auto lim = build_limit_game(w.structure);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t e = 0; e < 5; ++e) {
        std::vector<double> probs;
        for (std::size_t j = 0; j < n; ++j)
          if (j != i) probs.push_back(g.activity(j) * resource_choice_prob(g, eq.profile, j, e));
        const Pmf z = bernoulli_sum_pmf(probs);
        double lhs = 0.0;
        for (std::size_t m = 0; m < z.size(); ++m) lhs += z.probs[m] * w.structure.cost(e).at(1 + static_cast<std::int64_t>(m));
        EXPECT_LE(std::abs(lhs - aux_cost_eval(lim.cost(e), x[e]).value), lambda_bound(k, r) + 1e-12) << n << " " << e;
      }
  }
}

TEST(BorisovRuzankin, ConsistentWithSmoothedCost) {
  oracle::Gen gen(1234);
  const auto c = CostFunction::polynomial({0.5, 1.0, 1.0});
  const auto aux = make_aux_cost(c, 1e-13);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = gen.probs(gen.index(1, 40), 0.0, 0.3);
    const Pmf s = bernoulli_sum_pmf(p);
    double lhs = 0.0, x = 0.0, mp = 0.0;
    for (std::size_t m = 0; m < s.size(); ++m) lhs += s.probs[m] * c.at(1 + static_cast<std::int64_t>(m));
    for (double q : p) {
      x += q;
      mp = std::max(mp, q);
    }
    EXPECT_LE(std::abs(lhs - aux_cost_eval(aux, x).value), borisov_ruzankin_bound(x, 2.0, mp) + 1e-12);
  }
}

TEST(RestrictedMonotonicity, Examples) {
  EXPECT_NEAR(*restricted_monotonicity(instances::pigou().structure, 1.5, Model::weighted), 0.5, 1e-12);
  EXPECT_NEAR(*restricted_monotonicity(instances::wheatstone().structure, 1.5, Model::weighted), 0.25, 1e-12);
  const auto one = Structure::from_ids({"a"}, {CostFunction::affine(1, 0)}, {"t"}, {{{"a"}}});
  EXPECT_FALSE(restricted_monotonicity(one, 1.0, Model::weighted).has_value());
}
