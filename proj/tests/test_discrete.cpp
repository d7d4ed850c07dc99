#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "cglab/discrete.hpp"
#include "oracles.hpp"

using namespace cglab;

TEST(PoissonPmf, ZeroMeanIsPointMass) {
  const Pmf p = poisson_pmf(0.0);
  EXPECT_DOUBLE_EQ(p.at(0), 1.0);
  EXPECT_EQ(p.tail_mass, 0.0);
}

TEST(PoissonPmf, UnitMeanFirstTerms) {
  const Pmf p = poisson_pmf(1.0);
  EXPECT_NEAR(p.at(0), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(p.at(1), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(p.at(2), std::exp(-1.0) / 2, 1e-15);
}

TEST(PoissonPmf, TailIsCertifiedAndMassAddsUp) {
  for (double x : {0.01, 0.5, 1.0, 3.7, 12.0, 40.0}) {
    for (double tol : {1e-6, 1e-10, 1e-14}) {
      const Pmf p = poisson_pmf(x, tol);
      EXPECT_LT(p.tail_mass, tol) << x;
      EXPECT_NEAR(p.total(), 1.0, 1e-13) << x;
      // Independent check of the remainder.
      long double rest = 0.0L;
      long double term = std::exp(-static_cast<long double>(x));
      for (std::size_t k = 0; k < p.size() + 400; ++k) {
        if (k >= p.size()) rest += term;
        term *= static_cast<long double>(x) / static_cast<long double>(k + 1);
      }
      EXPECT_NEAR(static_cast<double>(rest), p.tail_mass, 1e-15 + 1e-9 * p.tail_mass) << x;
      EXPECT_NEAR(p.mean(), x, tol * static_cast<double>(p.size()) + 1e-12) << x;
    }
  }
}

TEST(PoissonPmf, RejectsBadMean) {
  EXPECT_THROW(poisson_pmf(-1.0), DomainError);
  EXPECT_THROW(poisson_pmf(std::nan("")), DomainError);
}

TEST(BernoulliSum, FairCoins) {
  const std::vector<double> p{0.5, 0.5};
  const Pmf r = bernoulli_sum_pmf(p);
  EXPECT_DOUBLE_EQ(r.at(0), 0.25);
  EXPECT_DOUBLE_EQ(r.at(1), 0.5);
  EXPECT_DOUBLE_EQ(r.at(2), 0.25);
  EXPECT_EQ(r.tail_mass, 0.0);
}

TEST(BernoulliSum, EmptyIsPointMass) {
  const Pmf r = bernoulli_sum_pmf({});
  EXPECT_DOUBLE_EQ(r.at(0), 1.0);
}

TEST(BernoulliSum, TenCoinsMatchEnumeration) {
  const std::vector<double> p(10, 0.1);
  const Pmf r = bernoulli_sum_pmf(p);
  const auto ref = oracle::bernoulli_sum_enumerated(p);
  for (std::size_t k = 0; k <= 10; ++k) EXPECT_NEAR(r.at(static_cast<std::int64_t>(k)), ref[k], 1e-12);
}

TEST(BernoulliSum, RandomVectorsMatchEnumeration) {
  oracle::Gen gen(11);
  for (int trial = 0; trial < 60; ++trial) {
    const auto p = gen.probs(gen.index(0, 12), 0.0, 1.0);
    const Pmf r = bernoulli_sum_pmf(p);
    const auto ref = oracle::bernoulli_sum_enumerated(p);
    for (std::size_t k = 0; k < ref.size(); ++k) ASSERT_NEAR(r.at(static_cast<std::int64_t>(k)), ref[k], 1e-12);
    EXPECT_NEAR(r.mean(), std::accumulate(p.begin(), p.end(), 0.0), 1e-12);
  }
}

TEST(BernoulliSum, RejectsOutOfRange) {
  const std::vector<double> p{0.2, 1.5};
  EXPECT_THROW(bernoulli_sum_pmf(p), DomainError);
}

TEST(WeightedSum, HalfWeights) {
  const std::vector<double> w{0.5, 0.5}, p{0.5, 0.5};
  const auto d = weighted_sum_distribution(w, p);
  EXPECT_TRUE(d.exact);
  EXPECT_NEAR(d.mass_at(0.0), 0.25, 1e-15);
  EXPECT_NEAR(d.mass_at(0.5), 0.5, 1e-15);
  EXPECT_NEAR(d.mass_at(1.0), 0.25, 1e-15);
}

TEST(WeightedSum, FourOutcomes) {
  const std::vector<double> w{1, 2}, p{0.3, 0.6};
  const auto d = weighted_sum_distribution(w, p);
  EXPECT_NEAR(d.mass_at(0), 0.28, 1e-15);
  EXPECT_NEAR(d.mass_at(1), 0.12, 1e-15);
  EXPECT_NEAR(d.mass_at(2), 0.42, 1e-15);
  EXPECT_NEAR(d.mass_at(3), 0.18, 1e-15);
}

TEST(WeightedSum, EqualWeightsScaleTheCountLaw) {
  oracle::Gen gen(5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = gen.index(1, 12);
    const double w = gen.uniform(0.1, 3.0);
    const auto p = gen.probs(n, 0.0, 1.0);
    const std::vector<double> ws(n, w);
    const auto d = weighted_sum_distribution(ws, p);
    const Pmf c = bernoulli_sum_pmf(p);
    for (std::size_t k = 0; k <= n; ++k) EXPECT_NEAR(d.mass_at(w * static_cast<double>(k), 1e-9), c.at(static_cast<std::int64_t>(k)), 1e-12);
  }
}

TEST(WeightedSum, CapacityAndMonteCarlo) {
  const std::vector<double> w(21, 0.1), p(21, 0.5);
  EXPECT_THROW(weighted_sum_distribution(w, p), CapacityError);
  MonteCarlo mc{42, 200000, 0};
  const auto a = weighted_sum_distribution(w, p, mc);
  const auto b = weighted_sum_distribution(w, p, mc);
  EXPECT_FALSE(a.exact);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.masses, b.masses);
  // Mean 1.05, sd of the sample mean ~ 0.23/sqrt(2e5).
  EXPECT_NEAR(a.mean(), 1.05, 5 * 0.229 / std::sqrt(2e5));
  EXPECT_NEAR(a.variance(), 21 * 0.01 * 0.25, 2e-3);
  mc.seed = 43;
  EXPECT_NE(weighted_sum_distribution(w, p, mc).masses, a.masses);
}

TEST(TvDistance, Basics) {
  const Pmf p = poisson_pmf(1.3, 1e-14);
  EXPECT_NEAR(tv_distance(p, p).upper, 0.0, 1e-13);
  const auto t = tv_distance(Pmf::point_mass(0), Pmf::point_mass(1));
  EXPECT_DOUBLE_EQ(t.lower, 1.0);
  EXPECT_DOUBLE_EQ(t.upper, 1.0);
}

TEST(TvDistance, IntervalBracketsTruncationEffect) {
  const Pmf a = poisson_pmf(2.0, 1e-4);
  const Pmf b = poisson_pmf(2.0, 1e-15);
  const auto t = tv_distance(a, b);
  EXPECT_LE(t.lower, 1e-15);
  EXPECT_GE(t.upper, 0.5 * a.tail_mass);
}

TEST(TvPoissonBound, Examples) {
  EXPECT_EQ(tv_poisson_bound(1, 1).tight, 0.0);
  EXPECT_NEAR(tv_poisson_bound(1, 1.1).tight, 1 - std::exp(-0.1), 1e-15);
  EXPECT_NEAR(tv_poisson_bound(1, 1.1).tight, 0.09516, 1e-5);
  EXPECT_NEAR(tv_poisson_bound(1, 1.1).linear, 0.1, 1e-15);
}

TEST(TvPoissonBound, DominatesExactDistance) {
  oracle::Gen gen(3);
  for (int trial = 0; trial < 50; ++trial) {
    const double x = gen.uniform(0.0, 8.0), y = gen.uniform(0.0, 8.0);
    const auto t = tv_distance(poisson_pmf(x, 1e-14), poisson_pmf(y, 1e-14));
    EXPECT_LE(t.upper, tv_poisson_bound(x, y).tight + 1e-12);
    EXPECT_LE(tv_poisson_bound(x, y).tight, tv_poisson_bound(x, y).linear);
  }
}

TEST(BarbourHall, Examples) {
  const std::vector<double> ten(10, 0.1);
  EXPECT_NEAR(barbour_hall_bound(ten).bound, (1 - std::exp(-1.0)) * 0.1, 1e-15);
  EXPECT_NEAR(barbour_hall_bound(ten).bound, 0.06321, 1e-5);
  const std::vector<double> one{0.3};
  EXPECT_NEAR(barbour_hall_bound(one).bound, (1 - std::exp(-0.3)) * 0.3, 1e-15);
  EXPECT_LE(barbour_hall_bound(one).bound, 0.3);
  const auto tv = tv_distance(bernoulli_sum_pmf(ten), poisson_pmf(1.0, 1e-15));
  EXPECT_LE(tv.upper, barbour_hall_bound(ten).bound);
}

TEST(BarbourHall, RandomVectorsAreDominated) {
  oracle::Gen gen(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = gen.probs(gen.index(1, 50), 0.0, 0.3);
    const double x = std::accumulate(p.begin(), p.end(), 0.0);
    const auto tv = tv_distance(bernoulli_sum_pmf(p), poisson_pmf(x, 1e-15));
    const auto bh = barbour_hall_bound(p);
    EXPECT_LE(tv.upper, bh.bound * (1 + 1e-12)) << trial;
    EXPECT_LE(bh.bound, bh.max_p) << trial;
  }
}

// A single Bernoulli attains the bound: TV = p (1 - e^-p).
TEST(BarbourHall, TightForOneSummand) {
  for (double p : {0.01, 0.1, 0.23, 0.3}) {
    const std::vector<double> v{p};
    const auto tv = tv_distance(bernoulli_sum_pmf(v), poisson_pmf(p, 1e-16));
    EXPECT_NEAR(tv.upper, barbour_hall_bound(v).bound, 1e-15);
    EXPECT_NEAR(tv.upper, p * -std::expm1(-p), 1e-15);
  }
}

TEST(BorisovRuzankin, Examples) {
  EXPECT_EQ(borisov_ruzankin_bound(1.0, 0.0, 0.1), 0.0);
  EXPECT_NEAR(borisov_ruzankin_bound(1.0, 1.0, 0.1), 0.5 * 0.1 * std::exp(0.1) / 0.81, 1e-15);
  EXPECT_NEAR(borisov_ruzankin_bound(1.0, 1.0, 0.1), 0.06823, 1e-5);
  // h(k) = k^2 has nu = 2. E S^2 = 1.9 for Binomial(10, 0.1), E X^2 = 2 for Poisson(1).
  const std::vector<double> p(10, 0.1);
  const Pmf s = bernoulli_sum_pmf(p);
  const double es2 = expect_over(s, [](std::int64_t k) { return static_cast<double>(k * k); }).value;
  EXPECT_NEAR(es2, 1.9, 1e-13);
  EXPECT_LE(std::abs(es2 - 2.0), borisov_ruzankin_bound(1.0, 2.0, 0.1));
  EXPECT_THROW(borisov_ruzankin_bound(1.0, 1.0, 1.0), DomainError);
}

TEST(ExpectOver, Identities) {
  const Pmf p = poisson_pmf(2.0, 1e-14);
  const auto env = GrowthEnvelope::polynomial(2, 1.0);
  EXPECT_NEAR(expect_over(p, [](std::int64_t) { return 1.0; }, &env).value, 1.0, 1e-13);
  EXPECT_NEAR(expect_over(p, [](std::int64_t k) { return static_cast<double>(k); }, &env).value, 2.0, 1e-12);
  const auto fm = expect_over(p, [](std::int64_t k) { return static_cast<double>(k * (k - 1)); }, &env);
  EXPECT_NEAR(fm.value, 4.0, 1e-9);
  EXPECT_LE(fm.lower(), 4.0 + 1e-12);
  EXPECT_GE(fm.upper(), 4.0 - 1e-12);
  const double ref = static_cast<double>(oracle::poisson_sum(2.0, [](long k) { return static_cast<long double>(k * (k - 1)); }));
  EXPECT_NEAR(fm.value, ref, 1e-11);
}

TEST(ExpectOver, TruncatedLawWithoutEnvelopeIsRejected) {
  const Pmf p = poisson_pmf(2.0, 1e-8);
  EXPECT_THROW(expect_over(p, [](std::int64_t) { return 1.0; }), PrecisionError);
  // A finite law needs no envelope.
  const std::vector<double> q{0.2, 0.7};
  EXPECT_NO_THROW(expect_over(bernoulli_sum_pmf(q), [](std::int64_t) { return 1.0; }));
}

TEST(PoissonExpectation, MatchesHighOrderTruncation) {
  oracle::Gen gen(99);
  for (int trial = 0; trial < 30; ++trial) {
    const double x = gen.uniform(0.0, 6.0);
    const double a = gen.uniform(0.1, 0.8);
    const auto env = GrowthEnvelope::exponential(a, 1.0);
    const auto r = poisson_expectation(x, [a](std::int64_t k) { return std::exp(a * static_cast<double>(k)); }, env, 1e-12);
    // E e^{aX} = exp(x (e^a - 1)).
    const double exact = std::exp(x * std::expm1(a));
    EXPECT_LE(r.error, 1e-12);
    EXPECT_NEAR(r.value, exact, 1e-12 * exact + 1e-12);
  }
}

TEST(CounterRng, ReproducibleStreams) {
  CounterRng a(7, 1), b(7, 1), c(7, 2);
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    EXPECT_EQ(u, b.uniform());
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
  CounterRng d(7, 1);
  EXPECT_NE(c.uniform(), d.uniform());
}
