#include "noisysort/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "noisysort/errors.hpp"
#include "noisysort/rng.hpp"

namespace noisysort {

namespace {

double pairs_of(std::size_t n) { return static_cast<double>(n) * static_cast<double>(n - 1) / 2.0; }

}  // namespace

Permutation sort_by_scores(std::span<const double> scores) {
  const std::size_t n = scores.size();
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return scores[a] < scores[b]; });
  std::vector<std::uint32_t> rank(n);
  for (std::size_t pos = 0; pos < n; ++pos) rank[order[pos]] = static_cast<std::uint32_t>(pos + 1);
  return from_ranks_unchecked(std::move(rank));
}

Permutation borda_sort(const ComparisonDataset& dataset) {
  std::vector<double> scores(dataset.size());
  for (std::size_t i = 1; i <= dataset.size(); ++i) {
    scores[i - 1] = static_cast<double>(dataset.total_wins(i));
  }
  return sort_by_scores(scores);
}

Permutation random_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::uint32_t> v(n);
  std::iota(v.begin(), v.end(), 1u);
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(v[i - 1], v[uniform_below(rng, i)]);
  }
  return from_ranks_unchecked(std::move(v));
}

// --- lambda_hat -------------------------------------------------------------

LambdaEstimate estimate_lambda(const ComparisonDataset& pilot, const ComparisonDataset& holdout) {
  const std::size_t n = pilot.size();
  if (holdout.size() != n) throw DimensionMismatch(n, holdout.size());
  if (n < 4) throw PreconditionError("estimate_lambda needs n >= 4, got " + std::to_string(n));
  if (holdout.total_comparisons() == 0) throw PreconditionError("holdout sample is empty");

  LambdaEstimate est;
  est.pilot_order = borda_sort(pilot);
  const auto& rank = est.pilot_order;

  // Pairs with rank gap d > n/2 number sum_{d > n/2} (n - d) = C(n - floor(n/2), 2).
  const std::uint64_t m = n - n / 2;
  est.index_set_size = m * (m - 1) / 2;

  std::uint64_t wins = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    const std::uint64_t ri = rank(i);
    holdout.for_each_in_row(i, [&](std::size_t j, std::uint32_t a) {
      const std::uint64_t rj = rank(j);
      if (ri > rj && 2 * (ri - rj) > n) wins += a;
    });
  }
  est.index_set_wins = wins;
  est.raw = pairs_of(n) / static_cast<double>(est.index_set_size) * static_cast<double>(wins) /
                static_cast<double>(holdout.total_comparisons()) -
            0.5;
  est.value = std::clamp(est.raw, kLambdaClamp, 0.5 - kLambdaClamp);
  return est;
}

// --- Multistage sorting -----------------------------------------------------

void MsConfig::validate() const {
  if (stages < 1) throw PreconditionError("MS needs T >= 1");
  if (!(c0 > 0) || !(c1 > 0)) throw PreconditionError("MS constants c0, c1 must be positive");
  if (threshold_constant && !(*threshold_constant > 0)) {
    throw PreconditionError("threshold constant must be positive");
  }
  if (lambda_hat_override && !(*lambda_hat_override > 0 && *lambda_hat_override < 0.5)) {
    throw PreconditionError("lambda_hat override must lie in (0, 1/2)");
  }
}

MsState MsState::initial(std::size_t n) {
  MsState s;
  s.stage = 0;
  s.n = n;
  s.thresholds.assign(n, std::numeric_limits<double>::quiet_NaN());
  s.gate_fired.assign(n, 0);
  s.relation.assign(n * n, 0);
  s.below_count.assign(n, 0);
  s.uncertain_count.assign(n, static_cast<std::uint32_t>(n));
  s.above_count.assign(n, 0);
  return s;
}

std::vector<std::size_t> MsState::set(std::size_t i, Relation r) const {
  std::vector<std::size_t> out;
  const auto* row = relation.data() + (i - 1) * n;
  for (std::size_t j = 0; j < n; ++j) {
    if (row[j] == static_cast<std::int8_t>(r)) out.push_back(j + 1);
  }
  return out;
}

std::uint64_t MsState::region_size() const {
  return std::accumulate(uncertain_count.begin(), uncertain_count.end(), std::uint64_t{0});
}

MsResult ms_sort(std::span<const ComparisonDataset> stage_samples, double lambda_hat,
                 const MsConfig& config) {
  config.validate();
  const std::size_t T = config.stages;
  if (stage_samples.size() != T) {
    throw PreconditionError("MS expects " + std::to_string(T) + " stage samples, got " +
                            std::to_string(stage_samples.size()));
  }
  const std::size_t n = stage_samples.front().size();
  std::uint64_t total = 0, smallest = std::numeric_limits<std::uint64_t>::max(), largest = 0;
  for (const auto& d : stage_samples) {
    if (d.size() != n) throw DimensionMismatch(d.size(), n);
    total += d.total_comparisons();
    smallest = std::min(smallest, d.total_comparisons());
    largest = std::max(largest, d.total_comparisons());
  }
  if (n > 1 && smallest == 0) throw PreconditionError("MS stage sample with no comparisons");
  const bool all_with = std::all_of(stage_samples.begin(), stage_samples.end(), [](const auto& d) {
    return d.tag().model == SamplingModel::WithReplacement;
  });
  if (all_with && largest - smallest > 1) {
    throw PreconditionError("with-replacement stage budgets differ by more than one comparison");
  }

  MsResult result;
  result.lambda_hat = config.lambda_hat_override.value_or(lambda_hat);
  if (!(result.lambda_hat > 0 && result.lambda_hat < 0.5)) {
    throw PreconditionError("lambda_hat must lie in (0, 1/2)");
  }
  if (n == 1) {
    result.estimate = Permutation::identity(1);
    result.states.push_back(MsState::initial(1));
    return result;
  }

  const double dn = static_cast<double>(n);
  const double dT = static_cast<double>(T);
  const double dN = static_cast<double>(total);
  const double log_nT = std::log(dn * dT);
  const double gate = config.c1 * dn * dn * dT / dN * log_nT;
  const double tau_scale = config.effective_threshold_constant() * dn;
  const double win_above = 0.5 + result.lambda_hat;
  const double win_below = 0.5 - result.lambda_hat;

  MsState prev = MsState::initial(n);
  if (config.record_states) result.states.push_back(prev);

  for (std::size_t t = 1; t <= T; ++t) {
    const ComparisonDataset& data = stage_samples[t - 1];
    const double scale = pairs_of(n) / static_cast<double>(data.total_comparisons());

    MsState cur;
    cur.stage = t;
    cur.n = n;
    cur.scores.assign(n, 0.0);
    cur.thresholds.assign(n, std::numeric_limits<double>::quiet_NaN());
    cur.gate_fired.assign(n, 0);

    for (std::size_t i = 1; i <= n; ++i) {
      const std::int8_t* row = prev.relation.data() + (i - 1) * n;
      std::uint64_t wins = 0;
      data.for_each_in_row(i, [&](std::size_t j, std::uint32_t a) {
        if (row[j - 1] == 0) wins += a;
      });
      cur.scores[i - 1] = scale * static_cast<double>(wins) + prev.below_count[i - 1] * win_above +
                          prev.above_count[i - 1] * win_below;
    }

    cur.relation = prev.relation;
    cur.below_count = prev.below_count;
    cur.uncertain_count = prev.uncertain_count;
    cur.above_count = prev.above_count;
    for (std::size_t i = 0; i < n; ++i) {
      const double size = prev.uncertain_count[i];
      if (size < gate) continue;
      const double tau = tau_scale * std::sqrt(size * dT * log_nT / dN);
      cur.gate_fired[i] = 1;
      cur.thresholds[i] = tau;
      std::int8_t* row = cur.relation.data() + i * n;
      std::uint32_t below = 0, above = 0;
      const double si = cur.scores[i];
      for (std::size_t j = 0; j < n; ++j) {
        const double diff = cur.scores[j] - si;
        if (diff < -tau) {
          row[j] = static_cast<std::int8_t>(Relation::Below);
          ++below;
        } else if (diff > tau) {
          row[j] = static_cast<std::int8_t>(Relation::Above);
          ++above;
        } else {
          row[j] = static_cast<std::int8_t>(Relation::Uncertain);
        }
      }
      cur.below_count[i] = below;
      cur.above_count[i] = above;
      cur.uncertain_count[i] = static_cast<std::uint32_t>(n) - below - above;
    }

    if (config.record_states) result.states.push_back(cur);
    prev = std::move(cur);
  }

  result.estimate = sort_by_scores(prev.scores);
  if (!config.record_states) result.states.push_back(std::move(prev));
  return result;
}

UncertaintyRegion uncertainty_region(const MsState& state) {
  UncertaintyRegion r;
  r.n = state.n;
  r.bitmap.assign(state.n * state.n, 0);
  r.pairs.reserve(state.region_size());
  for (std::size_t i = 0; i < state.n; ++i) {
    for (std::size_t j = 0; j < state.n; ++j) {
      if (state.relation[i * state.n + j] == 0) {
        r.bitmap[i * state.n + j] = 1;
        r.pairs.emplace_back(static_cast<std::uint32_t>(i + 1), static_cast<std::uint32_t>(j + 1));
      }
    }
  }
  return r;
}

std::uint64_t misclassified_pairs(const MsState& state, const Permutation& pi_star) {
  if (pi_star.size() != state.n) throw DimensionMismatch(pi_star.size(), state.n);
  std::uint64_t bad = 0;
  for (std::size_t i = 1; i <= state.n; ++i) {
    for (std::size_t j = 1; j <= state.n; ++j) {
      const Relation r = state.relation_of(i, j);
      if (r == Relation::Below && !(pi_star(j) < pi_star(i))) ++bad;
      if (r == Relation::Above && !(pi_star(j) > pi_star(i))) ++bad;
    }
  }
  return bad;
}

// --- Likelihood -------------------------------------------------------------

std::uint64_t mle_objective(const ComparisonDataset& dataset, const Permutation& pi) {
  if (dataset.size() != pi.size()) throw DimensionMismatch(dataset.size(), pi.size());
  std::uint64_t s = 0;
  for (std::size_t i = 1; i <= dataset.size(); ++i) {
    const auto ri = pi(i);
    dataset.for_each_in_row(i, [&](std::size_t j, std::uint32_t a) {
      if (ri > pi(j)) s += a;
    });
  }
  return s;
}

Permutation brute_force_mle(const ComparisonDataset& dataset, std::size_t cap) {
  std::optional<Permutation> best;
  std::uint64_t best_value = 0;
  for (const Permutation& p : PermutationRange(dataset.size(), cap)) {
    const std::uint64_t v = mle_objective(dataset, p);
    if (!best || v > best_value) {
      best = p;
      best_value = v;
    }
  }
  return *best;
}

Permutation sieve_mle(const ComparisonDataset& dataset, const PackingSet& net) {
  if (net.members.empty()) throw PreconditionError("sieve MLE over an empty net");
  if (net.n != dataset.size()) throw DimensionMismatch(net.n, dataset.size());
  // Members are not necessarily sorted; keep the lexicographically first
  // among maximizers.
  const Permutation* best = nullptr;
  std::uint64_t best_value = 0;
  for (const Permutation& p : net.members) {
    const std::uint64_t v = mle_objective(dataset, p);
    if (!best || v > best_value || (v == best_value && p < *best)) {
      best = &p;
      best_value = v;
    }
  }
  return *best;
}

double theoretical_phi(const SamplingTag& tag, std::size_t n, double lambda) {
  if (!(lambda > 0 && lambda < 0.5)) throw PreconditionError("lambda must lie in (0, 1/2)");
  if (!(tag.budget > 0)) throw PreconditionError("budget must be positive");
  const double dn = static_cast<double>(n);
  if (tag.model == SamplingModel::WithoutReplacement) return dn / (tag.budget * lambda * lambda);
  return dn * dn * dn / (tag.budget * lambda * lambda);
}

std::uint64_t sieve_radius(const SamplingTag& tag, std::size_t n, double lambda) {
  const double phi = theoretical_phi(tag, n, lambda);
  const double cap = pairs_of(n);
  if (cap < 1) return 0;
  return static_cast<std::uint64_t>(std::floor(std::clamp(phi, 1.0, cap)));
}

}  // namespace noisysort
