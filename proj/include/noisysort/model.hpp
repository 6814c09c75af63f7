#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "noisysort/permutation.hpp"

namespace noisysort {

// ---------------------------------------------------------------------------
// Probability matrices
// ---------------------------------------------------------------------------

/// Comparison probabilities indexed by rank: entry (a, b) is the chance that
/// the item of rank a beats the item of rank b. Either the canonical matrix
/// M*_n(lambda) (computed on the fly) or a dense user/generator supplied member
/// of the class M_n(lambda).
class ProbabilityMatrix {
 public:
  /// 1/2 + lambda below the diagonal, 1/2 - lambda above, 1/2 on it.
  static ProbabilityMatrix star(std::size_t n, double lambda);

  /// Dense member with entries 1/2 + lambda + U * (1/2 - lambda - eta) for
  /// a > b (U uniform), completed by skew symmetry. Requires
  /// 0 <= eta <= 1/2 - lambda.
  static ProbabilityMatrix random_member(std::size_t n, double lambda, double eta,
                                         std::uint64_t seed);

  /// Row-major n x n entries; throws PreconditionError unless they lie in
  /// M_n(lambda).
  static ProbabilityMatrix from_entries(std::size_t n, double lambda, std::vector<double> entries);

  std::size_t size() const noexcept { return n_; }
  double lambda() const noexcept { return lambda_; }
  bool is_star() const noexcept { return entries_.empty(); }

  /// Entry for 1-indexed ranks (a, b).
  double operator()(std::size_t a, std::size_t b) const {
    if (entries_.empty()) return a > b ? 0.5 + lambda_ : (a < b ? 0.5 - lambda_ : 0.5);
    return entries_[(a - 1) * n_ + (b - 1)];
  }

 private:
  ProbabilityMatrix(std::size_t n, double lambda, std::vector<double> entries)
      : n_(n), lambda_(lambda), entries_(std::move(entries)) {}

  std::size_t n_;
  double lambda_;
  std::vector<double> entries_;
};

/// Returns a description of the first violated condition of M_n(lambda), or
/// nullopt if the row-major entries describe a member.
std::optional<std::string> membership_violation(std::size_t n, double lambda,
                                                std::span<const double> entries,
                                                double tolerance = 1e-12);

// ---------------------------------------------------------------------------
// Comparison data
// ---------------------------------------------------------------------------

enum class SamplingModel { WithoutReplacement, WithReplacement };

/// Sampling model plus its budget: observation probability p for sampling
/// without replacement, number of draws N for sampling with replacement.
struct SamplingTag {
  SamplingModel model = SamplingModel::WithReplacement;
  double budget = 0;

  static SamplingTag without_replacement(double p) { return {SamplingModel::WithoutReplacement, p}; }
  static SamplingTag with_replacement(std::uint64_t n_draws) {
    return {SamplingModel::WithReplacement, static_cast<double>(n_draws)};
  }

  /// "without" or "with".
  std::string name() const;
  static SamplingModel parse_model(std::string_view name);

  friend bool operator==(const SamplingTag&, const SamplingTag&) = default;
};

/// One stored entry of a dataset row: opponent j (1-indexed) and A_ij.
struct RowEntry {
  std::uint32_t opponent;
  std::uint32_t wins;
};

/// Per-pair comparison counts N_ij and wins A_ij with A_ij + A_ji = N_ij and
/// zero diagonal. Rows are stored densely (n x n 32-bit counters) or as
/// sorted sparse rows listing every opponent with N_ij > 0. Immutable.
class ComparisonDataset {
 public:
  enum class Storage { Dense, Sparse };

  ComparisonDataset() = default;

  std::size_t size() const noexcept { return n_; }
  const SamplingTag& tag() const noexcept { return tag_; }
  std::uint64_t seed() const noexcept { return seed_; }
  Storage storage() const noexcept { return storage_; }
  /// Sum over i < j of N_ij.
  std::uint64_t total_comparisons() const noexcept { return total_; }

  /// A_ij for 1-indexed items.
  std::uint32_t wins(std::size_t i, std::size_t j) const;
  /// N_ij = A_ij + A_ji.
  std::uint32_t comparisons(std::size_t i, std::size_t j) const { return wins(i, j) + wins(j, i); }
  /// Sum_j A_ij.
  std::uint64_t total_wins(std::size_t i) const;

  /// Calls f(j, A_ij) for each stored opponent of 1-indexed item i, in
  /// increasing j. Dense storage visits every j != i (A_ij may be zero);
  /// sparse storage visits every j with N_ij > 0.
  template <class F>
  void for_each_in_row(std::size_t i, F&& f) const {
    if (storage_ == Storage::Dense) {
      const std::uint32_t* row = dense_.data() + (i - 1) * n_;
      for (std::size_t j = 1; j <= n_; ++j) {
        if (j != i) f(j, row[j - 1]);
      }
    } else {
      for (std::size_t k = row_ptr_[i - 1]; k < row_ptr_[i]; ++k) {
        f(static_cast<std::size_t>(sparse_[k].opponent), sparse_[k].wins);
      }
    }
  }

  friend bool operator==(const ComparisonDataset& a, const ComparisonDataset& b);

 private:
  friend class DatasetBuilder;

  std::size_t n_ = 0;
  SamplingTag tag_;
  std::uint64_t seed_ = 0;
  Storage storage_ = Storage::Dense;
  std::uint64_t total_ = 0;
  std::vector<std::uint32_t> dense_;
  std::vector<std::size_t> row_ptr_;
  std::vector<RowEntry> sparse_;
};

/// Accumulates comparison outcomes and freezes them into a dataset.
class DatasetBuilder {
 public:
  /// `expected_comparisons` selects the storage: dense when it is at least
  /// n^2 / 8, sparse otherwise. `force` overrides the choice.
  DatasetBuilder(std::size_t n, std::uint64_t expected_comparisons,
                 std::optional<ComparisonDataset::Storage> force = std::nullopt);

  /// Records `count` comparisons won by item `winner` over `loser` (1-indexed).
  void add_win(std::size_t winner, std::size_t loser, std::uint32_t count = 1);

  std::uint64_t total() const noexcept { return total_; }

  ComparisonDataset build(const SamplingTag& tag, std::uint64_t seed) &&;

 private:
  std::size_t n_;
  ComparisonDataset::Storage storage_;
  std::uint64_t total_ = 0;
  std::vector<std::uint32_t> dense_;
  std::vector<std::uint64_t> events_;  // (winner-1) * n + (loser-1), repeated
};

/// Storage the builder picks for `expected_comparisons` on n items.
ComparisonDataset::Storage default_storage(std::size_t n, std::uint64_t expected_comparisons);

/// Generating model: latent order, comparison probabilities, sampling model.
struct ModelParams {
  Permutation pi_star;
  ProbabilityMatrix matrix;
  SamplingTag sampling;
};

/// Sampling without replacement: each unordered pair is compared once with
/// probability p; item i then wins with probability M(pi*(i), pi*(j)).
ComparisonDataset sample_without_replacement(const Permutation& pi_star, const ProbabilityMatrix& m,
                                             double p, std::uint64_t seed);

/// Sampling with replacement: `n_draws` uniform pairs, each followed by a
/// Bernoulli outcome.
ComparisonDataset sample_with_replacement(const Permutation& pi_star, const ProbabilityMatrix& m,
                                          std::uint64_t n_draws, std::uint64_t seed);

/// Draws a dataset from `params` (either sampling model).
ComparisonDataset sample(const ModelParams& params, std::uint64_t seed);

/// Splits N draws into T stage budgets; the first N mod T stages get one extra.
std::vector<std::uint64_t> stage_budgets(std::uint64_t n_draws, std::size_t stages);

/// Independent with-replacement datasets, one per budget, sharing pi* and M.
/// Dataset k uses derive_seed(master_seed, k). `params.sampling` must be with
/// replacement and the budgets must sum to its N.
std::vector<ComparisonDataset> split_with_replacement(const ModelParams& params,
                                                      std::span<const std::uint64_t> budgets,
                                                      std::uint64_t master_seed);

/// Assigns every observed comparison to one of T buckets uniformly at random.
/// With-replacement input is dealt into buckets of exactly stage_budgets(N, T)
/// comparisons. Bucket counts and wins sum back to the input.
std::vector<ComparisonDataset> split_without_replacement(const ComparisonDataset& dataset,
                                                         std::size_t stages, std::uint64_t seed);

/// Pools comparisons of datasets over the same items.
ComparisonDataset merge(std::span<const ComparisonDataset> datasets);

/// Row sums s*_r = sum_{r' != r} M(r, r'), indexed by rank.
struct TrueScores {
  std::vector<double> by_rank;

  /// Score of 1-indexed item i under pi*.
  double of_item(const Permutation& pi_star, std::size_t i) const { return by_rank[pi_star(i) - 1]; }
};

TrueScores true_scores(const Permutation& pi_star, const ProbabilityMatrix& m);

}  // namespace noisysort
