#include "noisysort/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "noisysort/errors.hpp"
#include "noisysort/rng.hpp"

namespace noisysort {

namespace {

void require_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda < 0.5)) {
    throw PreconditionError("lambda must lie in (0, 1/2), got " + std::to_string(lambda));
  }
}

void require_sizes(const Permutation& pi_star, const ProbabilityMatrix& m) {
  if (pi_star.size() != m.size()) throw DimensionMismatch(pi_star.size(), m.size());
}

}  // namespace

// --- ProbabilityMatrix ------------------------------------------------------

ProbabilityMatrix ProbabilityMatrix::star(std::size_t n, double lambda) {
  require_lambda(lambda);
  if (n < 1) throw PreconditionError("matrix needs n >= 1");
  return ProbabilityMatrix(n, lambda, {});
}

ProbabilityMatrix ProbabilityMatrix::random_member(std::size_t n, double lambda, double eta,
                                                   std::uint64_t seed) {
  require_lambda(lambda);
  if (!(eta >= 0.0 && eta <= 0.5 - lambda)) {
    throw PreconditionError("eta must lie in [0, 1/2 - lambda]");
  }
  Rng rng(seed);
  std::vector<double> e(n * n, 0.5);
  for (std::size_t a = 1; a <= n; ++a) {
    for (std::size_t b = 1; b < a; ++b) {
      const double v = 0.5 + lambda + uniform_unit(rng) * (0.5 - lambda - eta);
      e[(a - 1) * n + (b - 1)] = v;
      e[(b - 1) * n + (a - 1)] = 1.0 - v;
    }
  }
  return ProbabilityMatrix(n, lambda, std::move(e));
}

ProbabilityMatrix ProbabilityMatrix::from_entries(std::size_t n, double lambda,
                                                  std::vector<double> entries) {
  require_lambda(lambda);
  if (entries.size() != n * n) throw DimensionMismatch(entries.size(), n * n);
  if (auto why = membership_violation(n, lambda, entries)) throw PreconditionError(*why);
  return ProbabilityMatrix(n, lambda, std::move(entries));
}

std::optional<std::string> membership_violation(std::size_t n, double lambda,
                                                std::span<const double> e, double tol) {
  if (e.size() != n * n) return "expected " + std::to_string(n * n) + " entries";
  for (std::size_t a = 1; a <= n; ++a) {
    for (std::size_t b = 1; b <= n; ++b) {
      const double v = e[(a - 1) * n + (b - 1)];
      const std::string at = "(" + std::to_string(a) + "," + std::to_string(b) + ")";
      if (!(v >= 0.0 && v <= 1.0)) return "entry " + at + " outside [0,1]";
      if (a == b) {
        if (std::abs(v - 0.5) > tol) return "diagonal entry " + at + " is not 1/2";
        continue;
      }
      if (std::abs(v + e[(b - 1) * n + (a - 1)] - 1.0) > tol) return "entry " + at + " breaks M + M^T = 1";
      if (a > b && v < 0.5 + lambda - tol) return "entry " + at + " below 1/2 + lambda";
      if (a < b && v > 0.5 - lambda + tol) return "entry " + at + " above 1/2 - lambda";
    }
  }
  return std::nullopt;
}

// --- SamplingTag ------------------------------------------------------------

std::string SamplingTag::name() const {
  return model == SamplingModel::WithReplacement ? "with" : "without";
}

SamplingModel SamplingTag::parse_model(std::string_view name) {
  if (name == "with" || name == "with_replacement") return SamplingModel::WithReplacement;
  if (name == "without" || name == "without_replacement") return SamplingModel::WithoutReplacement;
  throw PreconditionError("unknown sampling model '" + std::string(name) + "'");
}

// --- ComparisonDataset ------------------------------------------------------

std::uint32_t ComparisonDataset::wins(std::size_t i, std::size_t j) const {
  if (storage_ == Storage::Dense) return dense_[(i - 1) * n_ + (j - 1)];
  const auto first = sparse_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i - 1]);
  const auto last = sparse_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
  const auto it = std::lower_bound(first, last, j, [](const RowEntry& e, std::size_t col) {
    return e.opponent < col;
  });
  return it != last && it->opponent == j ? it->wins : 0;
}

std::uint64_t ComparisonDataset::total_wins(std::size_t i) const {
  std::uint64_t s = 0;
  for_each_in_row(i, [&](std::size_t, std::uint32_t a) { s += a; });
  return s;
}

bool operator==(const ComparisonDataset& a, const ComparisonDataset& b) {
  if (a.n_ != b.n_ || !(a.tag_ == b.tag_) || a.seed_ != b.seed_ || a.total_ != b.total_) return false;
  if (a.storage_ == b.storage_) {
    if (a.storage_ == ComparisonDataset::Storage::Dense) return a.dense_ == b.dense_;
    if (a.row_ptr_ != b.row_ptr_ || a.sparse_.size() != b.sparse_.size()) return false;
    for (std::size_t k = 0; k < a.sparse_.size(); ++k) {
      if (a.sparse_[k].opponent != b.sparse_[k].opponent || a.sparse_[k].wins != b.sparse_[k].wins)
        return false;
    }
    return true;
  }
  for (std::size_t i = 1; i <= a.n_; ++i)
    for (std::size_t j = 1; j <= a.n_; ++j)
      if (a.wins(i, j) != b.wins(i, j)) return false;
  return true;
}

// --- DatasetBuilder ---------------------------------------------------------

ComparisonDataset::Storage default_storage(std::size_t n, std::uint64_t expected) {
  const auto n2 = static_cast<std::uint64_t>(n) * n;
  return 8 * expected >= n2 ? ComparisonDataset::Storage::Dense : ComparisonDataset::Storage::Sparse;
}

DatasetBuilder::DatasetBuilder(std::size_t n, std::uint64_t expected,
                               std::optional<ComparisonDataset::Storage> force)
    : n_(n), storage_(force.value_or(default_storage(n, expected))) {
  if (n < 1) throw PreconditionError("dataset needs n >= 1");
  if (storage_ == ComparisonDataset::Storage::Dense) {
    dense_.assign(n * n, 0);
  } else {
    events_.reserve(expected + expected / 8);
  }
}

void DatasetBuilder::add_win(std::size_t winner, std::size_t loser, std::uint32_t count) {
  if (winner == loser || winner < 1 || loser < 1 || winner > n_ || loser > n_) {
    throw PreconditionError("invalid comparison (" + std::to_string(winner) + "," +
                            std::to_string(loser) + ")");
  }
  if (count == 0) return;
  total_ += count;
  if (storage_ == ComparisonDataset::Storage::Dense) {
    dense_[(winner - 1) * n_ + (loser - 1)] += count;
  } else {
    const std::uint64_t key = static_cast<std::uint64_t>(winner - 1) * n_ + (loser - 1);
    events_.insert(events_.end(), count, key);
  }
}

ComparisonDataset DatasetBuilder::build(const SamplingTag& tag, std::uint64_t seed) && {
  ComparisonDataset d;
  d.n_ = n_;
  d.tag_ = tag;
  d.seed_ = seed;
  d.storage_ = storage_;
  d.total_ = total_;
  if (storage_ == ComparisonDataset::Storage::Dense) {
    d.dense_ = std::move(dense_);
    return d;
  }
  // Each win (i beats j) contributes A_ij to row i and a zero placeholder to
  // row j so that both rows list the pair.
  std::vector<std::uint64_t> keys;
  keys.reserve(2 * events_.size());
  for (std::uint64_t e : events_) {
    keys.push_back(e << 1 | 1);
    const std::uint64_t i = e / n_, j = e % n_;
    keys.push_back((j * n_ + i) << 1);
  }
  events_.clear();
  events_.shrink_to_fit();
  std::sort(keys.begin(), keys.end());
  d.row_ptr_.assign(n_ + 1, 0);
  for (std::size_t k = 0; k < keys.size();) {
    const std::uint64_t cell = keys[k] >> 1;
    std::uint32_t w = 0;
    while (k < keys.size() && (keys[k] >> 1) == cell) w += static_cast<std::uint32_t>(keys[k++] & 1);
    const auto row = static_cast<std::size_t>(cell / n_);
    d.sparse_.push_back({static_cast<std::uint32_t>(cell % n_ + 1), w});
    ++d.row_ptr_[row + 1];
  }
  std::partial_sum(d.row_ptr_.begin(), d.row_ptr_.end(), d.row_ptr_.begin());
  return d;
}

// --- Sampling ---------------------------------------------------------------

ComparisonDataset sample_without_replacement(const Permutation& pi_star, const ProbabilityMatrix& m,
                                             double p, std::uint64_t seed) {
  require_sizes(pi_star, m);
  if (!(p > 0.0 && p <= 1.0)) throw PreconditionError("p must lie in (0, 1]");
  const std::size_t n = pi_star.size();
  const std::uint64_t pairs = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  DatasetBuilder builder(n, static_cast<std::uint64_t>(std::ceil(p * static_cast<double>(pairs))));
  Rng rng(seed);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = i + 1; j <= n; ++j) {
      if (!bernoulli(rng, p)) continue;
      if (bernoulli(rng, m(pi_star(i), pi_star(j)))) {
        builder.add_win(i, j);
      } else {
        builder.add_win(j, i);
      }
    }
  }
  return std::move(builder).build(SamplingTag::without_replacement(p), seed);
}

ComparisonDataset sample_with_replacement(const Permutation& pi_star, const ProbabilityMatrix& m,
                                          std::uint64_t n_draws, std::uint64_t seed) {
  require_sizes(pi_star, m);
  if (n_draws < 1) throw PreconditionError("N must be >= 1");
  const std::size_t n = pi_star.size();
  if (n < 2) throw PreconditionError("sampling with replacement needs n >= 2");
  DatasetBuilder builder(n, n_draws);
  Rng rng(seed);
  for (std::uint64_t t = 0; t < n_draws; ++t) {
    // A uniform ordered pair of distinct items is a uniform unordered pair.
    const std::size_t i = uniform_below(rng, n) + 1;
    std::size_t j = uniform_below(rng, n - 1) + 1;
    if (j >= i) ++j;
    if (bernoulli(rng, m(pi_star(i), pi_star(j)))) {
      builder.add_win(i, j);
    } else {
      builder.add_win(j, i);
    }
  }
  return std::move(builder).build(SamplingTag::with_replacement(n_draws), seed);
}

ComparisonDataset sample(const ModelParams& params, std::uint64_t seed) {
  if (params.sampling.model == SamplingModel::WithoutReplacement) {
    return sample_without_replacement(params.pi_star, params.matrix, params.sampling.budget, seed);
  }
  return sample_with_replacement(params.pi_star, params.matrix,
                                 static_cast<std::uint64_t>(params.sampling.budget), seed);
}

std::vector<std::uint64_t> stage_budgets(std::uint64_t n_draws, std::size_t stages) {
  if (stages < 1) throw PreconditionError("number of stages must be >= 1");
  std::vector<std::uint64_t> out(stages, n_draws / stages);
  for (std::size_t t = 0; t < n_draws % stages; ++t) ++out[t];
  return out;
}

std::vector<ComparisonDataset> split_with_replacement(const ModelParams& params,
                                                      std::span<const std::uint64_t> budgets,
                                                      std::uint64_t master_seed) {
  if (params.sampling.model != SamplingModel::WithReplacement) {
    throw PreconditionError("split_with_replacement needs a with-replacement model");
  }
  if (budgets.empty()) throw PreconditionError("at least one budget is required");
  const std::uint64_t sum = std::accumulate(budgets.begin(), budgets.end(), std::uint64_t{0});
  const auto total = static_cast<std::uint64_t>(params.sampling.budget);
  if (sum != total) {
    throw PreconditionError("budgets sum to " + std::to_string(sum) + " but N = " + std::to_string(total));
  }
  std::vector<ComparisonDataset> out;
  out.reserve(budgets.size());
  for (std::size_t k = 0; k < budgets.size(); ++k) {
    out.push_back(sample_with_replacement(params.pi_star, params.matrix, budgets[k],
                                          derive_seed(master_seed, k)));
  }
  return out;
}

std::vector<ComparisonDataset> split_without_replacement(const ComparisonDataset& dataset,
                                                         std::size_t stages, std::uint64_t seed) {
  if (stages < 1) throw PreconditionError("number of stages T must be >= 1");
  if (stages == 1) return {dataset};
  const std::size_t n = dataset.size();
  Rng rng(seed);
  std::vector<DatasetBuilder> builders;
  builders.reserve(stages);
  for (std::size_t t = 0; t < stages; ++t) {
    builders.emplace_back(n, dataset.total_comparisons() / stages, dataset.storage());
  }
  // With-replacement draws are exchangeable, so dealing them into buckets of
  // the exact stage budgets keeps every bucket a with-replacement sample.
  const bool exact = dataset.tag().model == SamplingModel::WithReplacement;
  std::vector<std::uint64_t> left = stage_budgets(dataset.total_comparisons(), stages);
  std::uint64_t remaining = dataset.total_comparisons();
  auto bucket = [&]() -> std::size_t {
    if (!exact) return static_cast<std::size_t>(uniform_below(rng, stages));
    std::uint64_t u = uniform_below(rng, remaining--);
    std::size_t t = 0;
    while (u >= left[t]) u -= left[t++];
    --left[t];
    return t;
  };
  for (std::size_t i = 1; i <= n; ++i) {
    dataset.for_each_in_row(i, [&](std::size_t j, std::uint32_t a_ij) {
      if (j <= i) return;
      const std::uint32_t a_ji = dataset.wins(j, i);
      for (std::uint32_t c = 0; c < a_ij; ++c) builders[bucket()].add_win(i, j);
      for (std::uint32_t c = 0; c < a_ji; ++c) builders[bucket()].add_win(j, i);
    });
  }
  SamplingTag tag = dataset.tag();
  if (tag.model == SamplingModel::WithoutReplacement) {
    tag.budget /= static_cast<double>(stages);
  }
  std::vector<ComparisonDataset> out;
  out.reserve(stages);
  for (std::size_t t = 0; t < stages; ++t) {
    auto& b = builders[t];
    SamplingTag bucket_tag = tag;
    if (tag.model == SamplingModel::WithReplacement) bucket_tag.budget = static_cast<double>(b.total());
    ComparisonDataset d = std::move(b).build(bucket_tag, derive_seed(seed, t));
    out.push_back(std::move(d));
  }
  return out;
}

ComparisonDataset merge(std::span<const ComparisonDataset> datasets) {
  if (datasets.empty()) throw PreconditionError("merge needs at least one dataset");
  const std::size_t n = datasets.front().size();
  std::uint64_t total = 0;
  for (const auto& d : datasets) {
    if (d.size() != n) throw DimensionMismatch(d.size(), n);
    total += d.total_comparisons();
  }
  DatasetBuilder builder(n, total);
  for (const auto& d : datasets) {
    for (std::size_t i = 1; i <= n; ++i) {
      d.for_each_in_row(i, [&](std::size_t j, std::uint32_t a) { builder.add_win(i, j, a); });
    }
  }
  SamplingTag tag = datasets.front().tag();
  if (tag.model == SamplingModel::WithReplacement) {
    tag.budget = static_cast<double>(total);
  } else {
    double p = 0;
    for (const auto& d : datasets) p += d.tag().budget;
    tag.budget = std::min(p, 1.0);
  }
  return std::move(builder).build(tag, datasets.front().seed());
}

TrueScores true_scores(const Permutation& pi_star, const ProbabilityMatrix& m) {
  require_sizes(pi_star, m);
  const std::size_t n = m.size();
  TrueScores s;
  s.by_rank.assign(n, 0.0);
  for (std::size_t a = 1; a <= n; ++a) {
    double row = 0;
    for (std::size_t b = 1; b <= n; ++b) {
      if (b != a) row += m(a, b);
    }
    s.by_rank[a - 1] = row;
  }
  return s;
}

}  // namespace noisysort
