#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "noisysort/combinatorics.hpp"
#include "noisysort/errors.hpp"
#include "oracles.hpp"

using namespace noisysort;

namespace {

// Exact counts of permutations of [n] by inversion number, by enumeration.
std::vector<std::uint64_t> enumerated_histogram(std::size_t n) {
  std::vector<std::uint64_t> h(n * (n - 1) / 2 + 1, 0);
  for (const auto& s : oracle::all_perms(n)) ++h[oracle::inversions(s)];
  return h;
}

}  // namespace

TEST(Counting, Examples) {
  for (std::size_t n = 1; n <= 9; ++n) EXPECT_EQ(count_at_most_k_inversions(n, 0), BigCount(1));
  EXPECT_EQ(count_at_most_k_inversions(3, 3), BigCount(6));
  EXPECT_EQ(count_at_most_k_inversions(3, 1), BigCount(3));
  EXPECT_THROW(count_at_most_k_inversions(3, 4), PreconditionError);
}

TEST(Counting, MatchesEnumerationAllK) {
  for (std::size_t n = 1; n <= 8; ++n) {
    const auto h = enumerated_histogram(n);
    std::uint64_t cumulative = 0;
    for (std::uint64_t k = 0; k < h.size(); ++k) {
      cumulative += h[k];
      ASSERT_EQ(count_at_most_k_inversions(n, k), BigCount(cumulative)) << n << " " << k;
    }
  }
}

TEST(Counting, FullRangeIsFactorial) {
  for (unsigned n = 1; n <= 20; ++n) {
    EXPECT_EQ(count_at_most_k_inversions(n, std::uint64_t{n} * (n - 1) / 2), factorial(n)) << n;
  }
  EXPECT_EQ(factorial(20).to_string(), "2432902008176640000");
  EXPECT_EQ(factorial(25).to_string(), "15511210043330985984000000");
}

TEST(Counting, MahonianDifferencesMatchEnumeration) {
  for (std::size_t n = 1; n <= 7; ++n) {
    const auto h = enumerated_histogram(n);
    const auto row = mahonian_row(n, h.size() - 1);
    for (std::uint64_t k = 0; k < h.size(); ++k) {
      ASSERT_EQ(row[k], BigCount(h[k]));
      if (k > 0) {
        const auto diff = count_at_most_k_inversions(n, k).value() - count_at_most_k_inversions(n, k - 1).value();
        ASSERT_EQ(BigCount(diff), BigCount(h[k]));
      }
    }
  }
}

TEST(BigCount, LogOfHugeValues) {
  EXPECT_NEAR(factorial(20).log(), std::lgamma(21.0), 1e-12);
  EXPECT_NEAR(factorial(1000).log(), std::lgamma(1001.0), 1e-9 * std::lgamma(1001.0));
  EXPECT_NEAR(factorial(3000).log(), std::lgamma(3001.0), 1e-9 * std::lgamma(3001.0));
}

TEST(InversionCountBounds, Examples) {
  EXPECT_TRUE(check_lemma_inversion_bounds(5, 10).holds);
  const auto r = check_lemma_inversion_bounds(8, 1);
  EXPECT_TRUE(r.holds);
  EXPECT_LT(r.lower_bound, 0);
  EXPECT_NEAR(r.log_count, std::log(8.0), 1e-12);  // identity and 7 adjacent swaps
  EXPECT_TRUE(check_lemma_inversion_bounds(3, 3).holds);
  EXPECT_THROW(check_lemma_inversion_bounds(3, 0), PreconditionError);
}

TEST(InversionCountBounds, HoldEverywhereSmallN) {
  for (std::size_t n = 3; n <= 8; ++n) {
    for (std::uint64_t k = 1; k <= n * (n - 1) / 2; ++k) {
      const auto r = check_lemma_inversion_bounds(n, k);
      const double nd = static_cast<double>(n), kd = static_cast<double>(k);
      EXPECT_DOUBLE_EQ(r.lower_bound, nd * std::log(kd / nd) - nd);
      EXPECT_DOUBLE_EQ(r.upper_bound, nd * std::log(1 + kd / nd) + nd);
      ASSERT_TRUE(r.holds) << n << " " << k;
    }
  }
}

TEST(Balls, Examples) {
  using P = Permutation;
  EXPECT_EQ(ball_members(P::identity(3), 0), std::vector<P>{P::identity(3)});
  const std::vector<P> expected{P({1, 2, 3}), P({1, 3, 2}), P({2, 1, 3})};
  EXPECT_EQ(ball_members(P::identity(3), 1), expected);
}

TEST(Balls, SizeIsCenterInvariant) {
  std::mt19937_64 rng(21);
  for (std::size_t n = 2; n <= 6; ++n) {
    for (int rep = 0; rep < 5; ++rep) {
      const Permutation c(oracle::random_seq(n, rng));
      const std::uint64_t r = rng() % (n * (n - 1) / 2 + 1);
      const auto members = ball_members(c, r);
      EXPECT_EQ(members.size(), ball_members(Permutation::identity(n), r).size());
      EXPECT_EQ(BigCount(members.size()), count_at_most_k_inversions(n, r));
      for (const auto& m : members) EXPECT_LE(kendall_tau(m, c), r);
    }
  }
}

TEST(Packing, Examples) {
  EXPECT_EQ(greedy_maximal_packing(4, 6).members.size(), 1u);
  EXPECT_EQ(greedy_maximal_packing(4, 0).members.size(), 24u);
  const auto p = greedy_maximal_packing(3, 1);
  EXPECT_EQ(p.members.size(), 3u);
}

TEST(Packing, PackingAndNetPropertiesExhaustive) {
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto all = enumerate_permutations(n);
    for (std::uint64_t eps : {0ull, 1ull, 2ull, 3ull, 5ull, 8ull}) {
      const auto pack = greedy_maximal_packing(n, eps);
      for (std::size_t a = 0; a < pack.members.size(); ++a) {
        for (std::size_t b = a + 1; b < pack.members.size(); ++b) {
          ASSERT_GT(kendall_tau(pack.members[a], pack.members[b]), eps);
        }
      }
      for (const auto& x : all) {
        bool covered = false;
        for (const auto& m : pack.members) covered = covered || kendall_tau(x, m) <= eps;
        ASSERT_TRUE(covered) << "n=" << n << " eps=" << eps;
      }
    }
  }
}

TEST(Packing, RestrictedToBall) {
  const Permutation c({2, 1, 4, 3, 5});
  const auto pack = greedy_maximal_packing(5, 1, BallUniverse{c, 4});
  const auto ball = ball_members(c, 4);
  for (const auto& m : pack.members) EXPECT_LE(kendall_tau(m, c), 4u);
  for (const auto& x : ball) {
    bool covered = false;
    for (const auto& m : pack.members) covered = covered || kendall_tau(x, m) <= 1;
    EXPECT_TRUE(covered);
  }
}

TEST(SparsePacking, RadiusOneSwaps) {
  const auto p = sparse_vg_packing(8, 1);
  // All weight <= 1 words are at Hamming distance >= 1 from each other.
  ASSERT_EQ(p.members.size(), 5u);
  EXPECT_EQ(p.members[0].permutation, Permutation::identity(8));
  for (std::size_t a = 1; a < p.members.size(); ++a) {
    const auto& perm = p.members[a].permutation;
    EXPECT_EQ(kendall_tau(perm, Permutation::identity(8)), 1u);
    for (std::size_t b = a + 1; b < p.members.size(); ++b) {
      EXPECT_EQ(kendall_tau(perm, p.members[b].permutation), 2u);
    }
  }
}

TEST(SparsePacking, PackingPropertiesAllRadii) {
  for (std::size_t n : {8u, 12u, 16u}) {
    for (std::uint64_t r = 1; r < n / 2; ++r) {
      const auto p = sparse_vg_packing(n, r);
      EXPECT_EQ(p.min_separation, (r + 1) / 2);
      for (const auto& m : p.members) {
        std::uint64_t ones = 0;
        for (auto bit : m.code) ones += bit;
        ASSERT_EQ(kendall_tau(m.permutation, Permutation::identity(n)), ones);
        ASSERT_LE(ones, r);
      }
      for (std::size_t a = 0; a < p.members.size(); ++a) {
        for (std::size_t b = a + 1; b < p.members.size(); ++b) {
          ASSERT_GE(kendall_tau(p.members[a].permutation, p.members[b].permutation), (r + 1) / 2);
        }
      }
      const double bound = std::exp(static_cast<double>(r) / 5 * std::log(static_cast<double>(n) / r));
      EXPECT_GE(static_cast<double>(p.members.size()), bound) << n << " " << r;
    }
  }
}

TEST(SparsePacking, RejectsBadArguments) {
  EXPECT_THROW(sparse_vg_packing(7, 1), PreconditionError);
  EXPECT_THROW(sparse_vg_packing(8, 4), PreconditionError);
  EXPECT_THROW(sparse_vg_packing(8, 0), PreconditionError);
  EXPECT_THROW(sparse_vg_packing(50, 3), CapExceeded);
}

TEST(Entropy, Examples) {
  const auto a = entropy_bounds(6, 10, 3);
  ASSERT_TRUE(a.within_bounds.has_value());
  EXPECT_TRUE(*a.within_bounds);
  EXPECT_LE(*a.log_greedy_size, a.prop_upper);
  EXPECT_GE(*a.log_greedy_size, a.prop_lower);
  const auto b = entropy_bounds(4, 6, 1);
  ASSERT_TRUE(b.within_bounds.has_value());
  EXPECT_TRUE(*b.within_bounds);
  EXPECT_THROW(entropy_bounds(6, 3, 3), PreconditionError);
  EXPECT_THROW(entropy_bounds(6, 3, 4), PreconditionError);
  EXPECT_FALSE(entropy_bounds(30, 100, 10).greedy_size.has_value());
}
