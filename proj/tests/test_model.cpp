#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <random>
#include <sstream>

#include "noisysort/dataset_io.hpp"
#include "noisysort/errors.hpp"
#include "noisysort/estimators.hpp"
#include "noisysort/model.hpp"
#include "noisysort/rng.hpp"
#include "oracles.hpp"

using namespace noisysort;

namespace {

double chi2_quantile(double df, double level) {
  return boost::math::quantile(boost::math::chi_squared(df), level);
}

void expect_dataset_invariants(const ComparisonDataset& d) {
  const std::size_t n = d.size();
  std::uint64_t total = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    ASSERT_EQ(d.wins(i, i), 0u);
    for (std::size_t j = i + 1; j <= n; ++j) {
      ASSERT_EQ(d.comparisons(i, j), d.wins(i, j) + d.wins(j, i));
      ASSERT_EQ(d.comparisons(i, j), d.comparisons(j, i));
      total += d.comparisons(i, j);
    }
  }
  ASSERT_EQ(total, d.total_comparisons());
  if (d.tag().model == SamplingModel::WithReplacement) {
    ASSERT_EQ(static_cast<double>(total), d.tag().budget);
  }
}

}  // namespace

TEST(ProbabilityMatrix, StarExamples) {
  const auto m = ProbabilityMatrix::star(2, 0.25);
  EXPECT_DOUBLE_EQ(m(1, 1), 0.5);
  EXPECT_DOUBLE_EQ(m(1, 2), 0.25);
  EXPECT_DOUBLE_EQ(m(2, 1), 0.75);
  EXPECT_DOUBLE_EQ(m(2, 2), 0.5);
  EXPECT_THROW(ProbabilityMatrix::star(3, 0.5), PreconditionError);
  EXPECT_THROW(ProbabilityMatrix::star(3, 0.0), PreconditionError);
}

TEST(ProbabilityMatrix, StarRowSumsAndSkewSymmetry) {
  for (std::size_t n = 1; n <= 50; ++n) {
    const double lambda = 0.1 + 0.3 * static_cast<double>(n) / 50;
    const auto m = ProbabilityMatrix::star(n, lambda);
    for (std::size_t i = 1; i <= n; ++i) {
      double row = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (j != i) {
          row += m(i, j);
          EXPECT_DOUBLE_EQ(m(i, j) + m(j, i), 1.0);
        }
      }
      const double formula = lambda * (2.0 * i - n - 1.0) + (n - 1.0) / 2;
      EXPECT_NEAR(row, formula, 1e-12);
    }
  }
}

TEST(ProbabilityMatrix, MembershipValidator) {
  const std::size_t n = 4;
  const double lambda = 0.2;
  const auto star = ProbabilityMatrix::star(n, lambda);
  std::vector<double> entries(n * n);
  for (std::size_t a = 1; a <= n; ++a) {
    for (std::size_t b = 1; b <= n; ++b) entries[(a - 1) * n + b - 1] = star(a, b);
  }
  EXPECT_FALSE(membership_violation(n, lambda, entries).has_value());
  auto broken = entries;
  broken[(3 - 1) * n + (1 - 1)] = 0.6;  // rank 3 over rank 1 must be >= 0.7
  broken[(1 - 1) * n + (3 - 1)] = 0.4;
  EXPECT_TRUE(membership_violation(n, lambda, broken).has_value());
  auto asym = entries;
  asym[1] = 0.1;
  EXPECT_TRUE(membership_violation(n, lambda, asym).has_value());
  EXPECT_THROW(ProbabilityMatrix::from_entries(n, lambda, broken), PreconditionError);
  EXPECT_NO_THROW(ProbabilityMatrix::from_entries(n, lambda, entries));
}

TEST(ProbabilityMatrix, RandomMemberIsMember) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 3 + seed % 8;
    const auto m = ProbabilityMatrix::random_member(n, 0.2, 0.05, seed);
    std::vector<double> entries(n * n);
    for (std::size_t a = 1; a <= n; ++a) {
      for (std::size_t b = 1; b <= n; ++b) entries[(a - 1) * n + b - 1] = m(a, b);
    }
    EXPECT_FALSE(membership_violation(n, 0.2, entries).has_value());
    for (std::size_t a = 2; a <= n; ++a) EXPECT_LE(m(a, 1), 1 - 0.05 + 1e-12);
  }
}

TEST(TrueScores, Examples) {
  const auto s = true_scores(Permutation::identity(4), ProbabilityMatrix::star(4, 0.25));
  ASSERT_EQ(s.by_rank.size(), 4u);
  const double expected[] = {0.75, 1.25, 1.75, 2.25};
  for (int k = 0; k < 4; ++k) EXPECT_DOUBLE_EQ(s.by_rank[k], expected[k]);
  EXPECT_EQ(true_scores(Permutation::identity(1), ProbabilityMatrix::star(1, 0.25)).by_rank,
            std::vector<double>{0.0});
  const auto g = true_scores(Permutation::identity(9), ProbabilityMatrix::random_member(9, 0.1, 0.0, 3));
  double total = 0;
  for (double v : g.by_rank) total += v;
  EXPECT_NEAR(total, 36.0, 1e-12);  // M(a, b) + M(b, a) = 1 over C(9, 2) pairs
  const Permutation pi({3, 1, 2, 4});
  EXPECT_DOUBLE_EQ(s.of_item(pi, 1), 1.75);
}

TEST(SampleWithoutReplacement, FullObservation) {
  const Permutation pi({2, 5, 1, 4, 3});
  const auto d = sample_without_replacement(pi, ProbabilityMatrix::star(5, 0.25), 1.0, 7);
  expect_dataset_invariants(d);
  for (std::size_t i = 1; i <= 5; ++i) {
    for (std::size_t j = i + 1; j <= 5; ++j) EXPECT_EQ(d.comparisons(i, j), 1u);
  }
}

TEST(SampleWithoutReplacement, StrongSignalWinRate) {
  std::mt19937_64 rng(31);
  const Permutation pi(oracle::random_seq(100, rng));
  const auto d = sample_without_replacement(pi, ProbabilityMatrix::star(100, 0.49), 1.0, 8);
  std::uint64_t stronger_wins = 0, total = 0;
  for (std::size_t i = 1; i <= 100; ++i) {
    for (std::size_t j = 1; j <= 100; ++j) {
      if (pi(i) > pi(j)) {
        stronger_wins += d.wins(i, j);
        total += d.comparisons(i, j);
      }
    }
  }
  EXPECT_GE(static_cast<double>(stronger_wins) / static_cast<double>(total), 0.95);
}

TEST(SampleWithoutReplacement, ExpectedCountWithinThreeSigma) {
  const std::size_t n = 50;
  const double p = 0.3;
  const double pairs = n * (n - 1) / 2.0;
  double sum = 0;
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    const auto d = sample_without_replacement(Permutation::identity(n), ProbabilityMatrix::star(n, 0.25), p, s);
    expect_dataset_invariants(d);
    sum += static_cast<double>(d.total_comparisons());
  }
  const double mean = sum / seeds;
  const double sd_of_mean = std::sqrt(pairs * p * (1 - p) / seeds);
  EXPECT_LT(std::abs(mean - p * pairs), 3 * sd_of_mean);
}

TEST(SampleWithReplacement, SingleDraw) {
  const auto d = sample_with_replacement(Permutation::identity(6), ProbabilityMatrix::star(6, 0.25), 1, 9);
  expect_dataset_invariants(d);
  int nonzero = 0;
  for (std::size_t i = 1; i <= 6; ++i) {
    for (std::size_t j = i + 1; j <= 6; ++j) {
      if (d.comparisons(i, j)) {
        ++nonzero;
        EXPECT_EQ(d.comparisons(i, j), 1u);
      }
    }
  }
  EXPECT_EQ(nonzero, 1);
}

TEST(SampleWithReplacement, OutcomesAndCountsPassChiSquare) {
  const std::size_t n = 20;
  const std::uint64_t draws = 100000;
  const double lambda = 0.25;
  std::mt19937_64 rng(41);
  const Permutation pi(oracle::random_seq(n, rng));
  const auto d = sample_with_replacement(pi, ProbabilityMatrix::star(n, lambda), draws, 10);
  expect_dataset_invariants(d);
  const double pairs = n * (n - 1) / 2.0;
  double outcome_stat = 0, count_stat = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      if (i == j) continue;
      if (pi(i) > pi(j)) {
        const double nij = d.comparisons(i, j);
        const double expected = nij * (0.5 + lambda);
        outcome_stat += (d.wins(i, j) - expected) * (d.wins(i, j) - expected) / (nij * (0.25 - lambda * lambda));
      }
      if (i < j) {
        const double e = draws / pairs;
        count_stat += (d.comparisons(i, j) - e) * (d.comparisons(i, j) - e) / e;
      }
    }
  }
  EXPECT_LT(outcome_stat, chi2_quantile(pairs, 0.99));
  EXPECT_LT(count_stat, chi2_quantile(pairs - 1, 0.99));
}

TEST(Sampling, DeterministicPerSeed) {
  const auto m = ProbabilityMatrix::star(40, 0.25);
  const auto pi = Permutation::reversal(40);
  EXPECT_EQ(sample_with_replacement(pi, m, 3000, 5), sample_with_replacement(pi, m, 3000, 5));
  EXPECT_FALSE(sample_with_replacement(pi, m, 3000, 5) == sample_with_replacement(pi, m, 3000, 6));
  EXPECT_EQ(sample_without_replacement(pi, m, 0.4, 5), sample_without_replacement(pi, m, 0.4, 5));
  EXPECT_FALSE(sample_without_replacement(pi, m, 0.4, 5) == sample_without_replacement(pi, m, 0.4, 6));
}

TEST(Sampling, ModelsAgreeOnExpectedPairCounts) {
  // p C(n,2) = N: both models observe each pair p times on average.
  const std::size_t n = 30;
  const double pairs = n * (n - 1) / 2.0;
  const double p = 0.4;
  const auto draws = static_cast<std::uint64_t>(p * pairs);
  const auto m = ProbabilityMatrix::star(n, 0.25);
  double with = 0, without = 0;
  const int seeds = 200;
  for (int s = 0; s < seeds; ++s) {
    with += sample_with_replacement(Permutation::identity(n), m, draws, s).comparisons(3, 17);
    without += sample_without_replacement(Permutation::identity(n), m, p, s).comparisons(3, 17);
  }
  const double sd = std::sqrt(p / seeds);
  EXPECT_NEAR(with / seeds, p, 4 * sd);
  EXPECT_NEAR(without / seeds, p, 4 * sd);
}

TEST(Storage, DenseAndSparseAgree) {
  const auto m = ProbabilityMatrix::star(60, 0.25);
  const auto pi = Permutation::reversal(60);
  const auto sparse = sample_with_replacement(pi, m, 200, 3);
  ASSERT_EQ(sparse.storage(), ComparisonDataset::Storage::Sparse);
  DatasetBuilder dense_builder(60, 200, ComparisonDataset::Storage::Dense);
  for (std::size_t i = 1; i <= 60; ++i) {
    sparse.for_each_in_row(i, [&](std::size_t j, std::uint32_t a) {
      if (a) dense_builder.add_win(i, j, a);
    });
  }
  const auto dense = std::move(dense_builder).build(sparse.tag(), sparse.seed());
  ASSERT_EQ(dense.storage(), ComparisonDataset::Storage::Dense);
  EXPECT_TRUE(dense == sparse);
  for (std::size_t i = 1; i <= 60; ++i) EXPECT_EQ(dense.total_wins(i), sparse.total_wins(i));
  EXPECT_EQ(default_storage(100, 1250), ComparisonDataset::Storage::Dense);
  EXPECT_EQ(default_storage(100, 1249), ComparisonDataset::Storage::Sparse);
}

TEST(Split, WithReplacementBudgets) {
  const ModelParams params{Permutation::identity(12), ProbabilityMatrix::star(12, 0.25),
                           SamplingTag::with_replacement(1001)};
  const auto one = split_with_replacement(params, std::vector<std::uint64_t>{1001}, 4);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].total_comparisons(), 1001u);
  EXPECT_EQ(stage_budgets(1001, 3), (std::vector<std::uint64_t>{334, 334, 333}));
  // Two lambda-estimation halves plus T stage samples.
  std::vector<std::uint64_t> budgets{500, 500};
  for (auto b : stage_budgets(1, 1)) budgets.push_back(b);
  const ModelParams p2{params.pi_star, params.matrix, SamplingTag::with_replacement(1001)};
  const auto parts = split_with_replacement(p2, budgets, 4);
  ASSERT_EQ(parts.size(), 3u);
  EXPECT_EQ(parts[0].total_comparisons(), 500u);
  EXPECT_EQ(parts[2].total_comparisons(), 1u);
  EXPECT_NE(parts[0].seed(), parts[1].seed());
  EXPECT_EQ(parts[1].seed(), derive_seed(4, 1));
  EXPECT_FALSE(parts[0] == parts[1]);
  EXPECT_THROW(split_with_replacement(params, std::vector<std::uint64_t>{1000}, 4), PreconditionError);
}

TEST(Split, WithoutReplacementPartitions) {
  const auto d = sample_without_replacement(Permutation::reversal(30), ProbabilityMatrix::star(30, 0.2), 1.0, 3);
  const auto same = split_without_replacement(d, 1, 9);
  ASSERT_EQ(same.size(), 1u);
  EXPECT_TRUE(same[0] == d);
  const auto parts = split_without_replacement(d, 3, 9);
  ASSERT_EQ(parts.size(), 3u);
  for (std::size_t i = 1; i <= 30; ++i) {
    for (std::size_t j = 1; j <= 30; ++j) {
      std::uint32_t a = 0;
      for (const auto& part : parts) a += part.wins(i, j);
      ASSERT_EQ(a, d.wins(i, j));
    }
  }
  for (const auto& part : parts) expect_dataset_invariants(part);
  const auto merged = merge(parts);
  for (std::size_t i = 1; i <= 30; ++i) {
    for (std::size_t j = 1; j <= 30; ++j) ASSERT_EQ(merged.wins(i, j), d.wins(i, j));
  }
}

TEST(Split, WithoutReplacementBucketSizesMultinomial) {
  const auto d = sample_without_replacement(Permutation::identity(40), ProbabilityMatrix::star(40, 0.2), 0.5, 2);
  const double total = static_cast<double>(d.total_comparisons());
  const std::size_t t = 4;
  const double sd = std::sqrt(total * (1.0 / t) * (1 - 1.0 / t));
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    for (const auto& part : split_without_replacement(d, t, seed)) {
      ASSERT_LT(std::abs(static_cast<double>(part.total_comparisons()) - total / t), 4 * sd);
    }
  }
}

TEST(Split, WithReplacementInputDealtExactly) {
  const auto d = sample_with_replacement(Permutation::reversal(25), ProbabilityMatrix::star(25, 0.2), 1001, 4);
  const auto parts = split_without_replacement(d, 3, 5);
  ASSERT_EQ(parts.size(), 3u);
  const std::uint64_t expected[] = {334, 334, 333};
  for (std::size_t t = 0; t < 3; ++t) {
    EXPECT_EQ(parts[t].total_comparisons(), expected[t]);
    EXPECT_EQ(parts[t].tag(), SamplingTag::with_replacement(expected[t]));
    expect_dataset_invariants(parts[t]);
  }
  const auto merged = merge(parts);
  for (std::size_t i = 1; i <= 25; ++i) {
    for (std::size_t j = 1; j <= 25; ++j) ASSERT_EQ(merged.wins(i, j), d.wins(i, j));
  }
}

TEST(DatasetIo, RoundTrip) {
  for (const bool with : {true, false}) {
    const auto m = ProbabilityMatrix::star(15, 0.3);
    const auto d = with ? sample_with_replacement(Permutation::reversal(15), m, 400, 2)
                        : sample_without_replacement(Permutation::reversal(15), m, 0.37, 2);
    std::stringstream buf;
    write_dataset(buf, d);
    const auto back = read_dataset(buf);
    EXPECT_TRUE(back == d);
    EXPECT_EQ(back.tag(), d.tag());
    EXPECT_EQ(back.seed(), d.seed());
  }
}

TEST(DatasetIo, RejectsInconsistentFiles) {
  std::stringstream missing_mirror("3 with 2 0\n1 2 2 1\n");
  EXPECT_THROW(read_dataset(missing_mirror), PreconditionError);
  std::stringstream bad_counts("3 with 2 0\n1 2 2 1\n2 1 2 2\n");
  EXPECT_THROW(read_dataset(bad_counts), PreconditionError);
  std::stringstream bad_total("3 with 5 0\n1 2 2 1\n2 1 2 1\n");
  EXPECT_THROW(read_dataset(bad_total), PreconditionError);
}

TEST(DatasetIo, PbmLayout) {
  std::stringstream out;
  const std::vector<std::uint8_t> bits{1, 0, 0, 1};
  write_pbm(out, 2, 2, bits);
  EXPECT_EQ(out.str(), "P1\n2 2\n10\n01\n");
}
