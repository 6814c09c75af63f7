#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "noisysort/combinatorics.hpp"
#include "noisysort/model.hpp"
#include "noisysort/permutation.hpp"

namespace noisysort {

/// Permutation ranking items by ascending score; equal scores are ordered by
/// ascending item index.
Permutation sort_by_scores(std::span<const double> scores);

/// Ranks items by total wins S_i = sum_j A_ij (ascending, ties by index).
Permutation borda_sort(const ComparisonDataset& dataset);

/// Uniformly random permutation (Fisher-Yates on the library RNG).
Permutation random_permutation(std::size_t n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Signal-strength estimate
// ---------------------------------------------------------------------------

inline constexpr double kLambdaClamp = 1e-6;

struct LambdaEstimate {
  double value = 0;  // clamped into [kLambdaClamp, 1/2 - kLambdaClamp]
  double raw = 0;    // before clamping
  Permutation pilot_order = Permutation::identity(1);
  std::uint64_t index_set_size = 0;  // pairs with pilot rank gap > n/2
  std::uint64_t index_set_wins = 0;
};

/// Pilot order from Borda on `pilot`; then averages the wins in `holdout`
/// over pairs the pilot places more than n/2 ranks apart:
///   lambda_hat = C(n,2) / |I| * (sum_I A''_ij) / N'' - 1/2.
/// Requires n >= 4 and a nonempty holdout sample.
LambdaEstimate estimate_lambda(const ComparisonDataset& pilot, const ComparisonDataset& holdout);

// ---------------------------------------------------------------------------
// Multistage sorting
// ---------------------------------------------------------------------------

/// Threshold multiplier used when MsConfig::threshold_constant is left at its
/// default. Scores at stage t have standard deviation about
/// (n/2) sqrt(T |I| / N), so a multiplier c puts the certainty cut at
/// 2 c sqrt(log(nT)) standard deviations.
inline constexpr double kDefaultThresholdConstant = 2.0;

struct MsConfig {
  std::size_t stages = 1;  // T
  double c0 = 1.0;         // lambda_hat deviation constant
  double c1 = 8.0;         // stage-gate constant
  /// tau = threshold_constant * n * sqrt(|I| T log(nT) / N). When nullopt the
  /// literal (10 + 2 c0) multiplier is used.
  std::optional<double> threshold_constant = kDefaultThresholdConstant;
  std::optional<double> lambda_hat_override;
  /// Keep the full per-stage states (n^2 bytes each) in the result.
  bool record_states = true;

  double effective_threshold_constant() const { return threshold_constant.value_or(10.0 + 2.0 * c0); }
  /// Throws PreconditionError on T < 1 or nonpositive constants.
  void validate() const;
};

/// Relation of item j to item i after a stage.
enum class Relation : std::int8_t { Below = -1, Uncertain = 0, Above = 1 };

/// Snapshot after stage t (t = 0 is the initial state): scores S^(t), the
/// thresholds tau_i^(t), and the partition of [n] into I_-(i), I(i), I_+(i).
struct MsState {
  std::size_t stage = 0;
  std::size_t n = 0;
  std::vector<double> scores;      // empty at stage 0
  std::vector<double> thresholds;  // NaN where the gate did not fire
  std::vector<std::uint8_t> gate_fired;
  std::vector<std::int8_t> relation;  // row-major n x n, Relation values
  std::vector<std::uint32_t> below_count;
  std::vector<std::uint32_t> uncertain_count;
  std::vector<std::uint32_t> above_count;

  static MsState initial(std::size_t n);

  /// Relation of 1-indexed j to 1-indexed i.
  Relation relation_of(std::size_t i, std::size_t j) const {
    return static_cast<Relation>(relation[(i - 1) * n + (j - 1)]);
  }
  /// Members (1-indexed, ascending) of the set with the given relation to i.
  std::vector<std::size_t> set(std::size_t i, Relation r) const;
  /// |R^(t)| = sum_i |I^(t)(i)|.
  std::uint64_t region_size() const;
};

struct MsResult {
  Permutation estimate = Permutation::identity(1);
  double lambda_hat = 0;
  /// states[t] for t = 0..T when record_states is set; otherwise only the
  /// final state.
  std::vector<MsState> states;
};

/// Runs T = stage_samples.size() stages of multistage sorting. Stage t scores
///   S_i = C(n,2)/N_t * sum_{j in I(i)} A^(t)_ij + |I_-(i)| (1/2 + lambda_hat)
///         + |I_+(i)| (1/2 - lambda_hat),
/// with N_t the stage's comparison count. Items whose uncertain set satisfies
/// |I(i)| >= c1 n^2 (T/N) log(nT) are repartitioned by the threshold tau_i;
/// the others keep their sets. Output sorts the final scores.
MsResult ms_sort(std::span<const ComparisonDataset> stage_samples, double lambda_hat,
                 const MsConfig& config);

/// Explicit pair list and dense bitmap of {(i, j) : j in I^(t)(i)}.
struct UncertaintyRegion {
  std::size_t n = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;  // 1-indexed, row-major
  std::vector<std::uint8_t> bitmap;                            // row i = item i

  std::size_t size() const noexcept { return pairs.size(); }
};

UncertaintyRegion uncertainty_region(const MsState& state);

/// Number of pairs placed in I_-/I_+ on the wrong side of pi*: j in I_-(i)
/// requires pi*(j) < pi*(i), j in I_+(i) requires pi*(j) > pi*(i).
std::uint64_t misclassified_pairs(const MsState& state, const Permutation& pi_star);

// ---------------------------------------------------------------------------
// Likelihood-based estimators
// ---------------------------------------------------------------------------

/// sum over ordered pairs with pi(i) > pi(j) of A_ij.
std::uint64_t mle_objective(const ComparisonDataset& dataset, const Permutation& pi);

/// Lexicographically first maximizer of mle_objective over S_n.
Permutation brute_force_mle(const ComparisonDataset& dataset, std::size_t cap = kDefaultEnumerationCap);

/// Lexicographically first maximizer of mle_objective over the net members.
Permutation sieve_mle(const ComparisonDataset& dataset, const PackingSet& net);

/// Net radius phi = n / (p lambda^2) without replacement, n^3 / (N lambda^2)
/// with replacement.
double theoretical_phi(const SamplingTag& tag, std::size_t n, double lambda);

/// phi rounded down and clamped to [1, n(n-1)/2].
std::uint64_t sieve_radius(const SamplingTag& tag, std::size_t n, double lambda);

}  // namespace noisysort
