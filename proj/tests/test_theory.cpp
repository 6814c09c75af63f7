#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <random>

#include "noisysort/errors.hpp"
#include "noisysort/theory.hpp"
#include "oracles.hpp"

using namespace noisysort;

TEST(BernoulliKl, Examples) {
  EXPECT_DOUBLE_EQ(bernoulli_kl(0.3, 0.3), 0.0);
  EXPECT_NEAR(bernoulli_kl(0.75, 0.25), 0.5 * std::log(3.0), 1e-15);
  EXPECT_THROW(bernoulli_kl(0.0, 0.5), PreconditionError);
  EXPECT_THROW(bernoulli_kl(0.5, 1.0), PreconditionError);
}

TEST(BernoulliKl, MatchesIntegralOfDerivative) {
  // d/dq KL(p || q) = (q - p) / (q (1 - q)); integrate from p to q.
  for (double p : {0.2, 0.5, 0.75}) {
    for (double q : {0.1, 0.4, 0.9}) {
      auto f = [p](double x) { return (x - p) / (x * (1 - x)); };
      const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, p, q);
      EXPECT_NEAR(bernoulli_kl(p, q), integral, 1e-10);
    }
  }
}

TEST(BernoulliKl, LowerBoundAndSymmetryOnGrid) {
  for (int a = 1; a < 40; ++a) {
    for (int b = 1; b < 40; ++b) {
      const double p = a / 40.0, q = b / 40.0;
      if (q < p) EXPECT_GE(bernoulli_kl(p, q), (p - q) * (p - q) / (2 * p * (1 - q)) - 1e-15);
      EXPECT_NEAR(bernoulli_kl(q, p), bernoulli_kl(1 - q, 1 - p), 1e-14);
    }
  }
}

TEST(TailBounds, Examples) {
  const auto b = binomial_tail_bounds(1000, 0.5, 0.4, 0.6);
  EXPECT_NEAR(b.lower_tail, std::exp(-1000 * 0.01 / (2 * 0.5 * 0.6)), 1e-20);
  EXPECT_NEAR(binomial_tail_bounds(1000, 0.5, 0.5 - 1e-9, 0.6).lower_tail, 1.0, 1e-9);
  // X -> N - X maps the upper tail at s to the lower tail at 1 - s.
  const auto u = binomial_tail_bounds(300, 0.3, 0.2, 0.45);
  const auto flipped = binomial_tail_bounds(300, 0.7, 0.55, 0.8);
  EXPECT_NEAR(u.upper_tail, flipped.lower_tail, 1e-15);
  EXPECT_THROW(binomial_tail_bounds(10, 0.5, 0.6, 0.7), PreconditionError);
  EXPECT_THROW(binomial_tail_bounds(10, 0.5, 0.4, 0.45), PreconditionError);
}

TEST(TailBounds, EmpiricalBelowBound) {
  const auto e = empirical_binomial_tails(100, 0.5, 0.3, 0.7, 200000, 3);
  const auto b = binomial_tail_bounds(100, 0.5, 0.3, 0.7);
  EXPECT_LE(e.lower_tail, b.lower_tail);
  EXPECT_LE(e.upper_tail, b.upper_tail);
  EXPECT_EQ(e.draws, 200000u);
}

TEST(ModelKl, Examples) {
  const auto id = Permutation::identity(5);
  EXPECT_DOUBLE_EQ(model_kl(id, id, SamplingTag::without_replacement(0.4), 0.25), 0.0);
  const auto swap = adjacent_transposition(5, 2);
  EXPECT_NEAR(model_kl(id, swap, SamplingTag::without_replacement(1.0), 0.25), 0.5 * std::log(3.0), 1e-15);
  EXPECT_NEAR(model_kl(id, swap, SamplingTag::without_replacement(1.0), 0.25), bernoulli_kl(0.75, 0.25), 1e-15);
  EXPECT_NEAR(model_kl(id, swap, SamplingTag::with_replacement(10), 0.25),
              model_kl(id, swap, SamplingTag::without_replacement(1.0), 0.25), 1e-15);
  EXPECT_THROW(model_kl(id, swap, SamplingTag::with_replacement(10), 0.5), PreconditionError);
  EXPECT_THROW(model_kl(id, Permutation::identity(4), SamplingTag::with_replacement(10), 0.2), DimensionMismatch);
}

TEST(ModelKl, MatchesPerPairOracle) {
  std::mt19937_64 rng(61);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + rep % 7;
    const auto a = oracle::random_seq(n, rng), b = oracle::random_seq(n, rng);
    const double lambda = 0.05 + 0.4 * (rep % 10) / 10.0;
    const double p = 0.1 + 0.8 * ((rep * 7) % 10) / 10.0;
    const std::uint64_t draws = 1 + rep * 13;
    const Permutation pa(a), pb(b);
    const double o1 = oracle::kl_without_replacement(a, b, p, lambda);
    const double o2 = oracle::kl_with_replacement(a, b, draws, lambda);
    const double k1 = model_kl(pa, pb, SamplingTag::without_replacement(p), lambda);
    const double k2 = model_kl(pa, pb, SamplingTag::with_replacement(draws), lambda);
    if (o1 == 0) {
      EXPECT_EQ(k1, 0.0);
      EXPECT_EQ(k2, 0.0);
      continue;
    }
    EXPECT_NEAR(k1 / o1, 1.0, 1e-12);
    EXPECT_NEAR(k2 / o2, 1.0, 1e-12);
  }
}

TEST(RateCurve, ShapesAndCaps) {
  const double cap = 10000.0 * 9999 / 2;
  for (auto kind : {RateKind::MinimaxO1, RateKind::MinimaxO2, RateKind::MsUpper, RateKind::LowerO1,
                    RateKind::LowerO2}) {
    EXPECT_EQ(parse_rate_kind(rate_kind_name(kind)), kind);
    EXPECT_DOUBLE_EQ(rate_curve(kind, 10000, 0.0, 0.25), cap);
    for (double budget : {1e-3, 0.5, 1.0, 1e3, 1e7, 1e12}) {
      const double v = rate_curve(kind, 10000, budget, 0.25);
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, cap);
    }
  }
  // Linear in n at fixed p.
  EXPECT_NEAR(rate_curve(RateKind::MinimaxO1, 2000, 1.0, 0.25) / rate_curve(RateKind::MinimaxO1, 1000, 1.0, 0.25),
              2.0, 1e-12);
  EXPECT_DOUBLE_EQ(rate_curve(RateKind::MinimaxO2, 10, 1000, 0.25), 16.0);
  const double n = 10000, big_n = 0.1 * cap;
  EXPECT_NEAR(rate_curve(RateKind::MsUpper, 10000, big_n, 0.25),
              std::min(cap, n * n * n / big_n * std::log(n) * std::log(std::log(n))), 1e-6);
  EXPECT_THROW(parse_rate_kind("nope"), PreconditionError);
}
