#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "noisysort/estimators.hpp"
#include "noisysort/model.hpp"

namespace noisysort {

enum class ExperimentKind { ScalingN, ScalingBudget, RegionSnapshot, LambdaAccuracy, MleSmallN };
enum class EstimatorId { Ms, Borda, Random, BruteMle, SieveMle };

ExperimentKind parse_experiment_kind(std::string_view name);
std::string_view experiment_kind_name(ExperimentKind kind);
EstimatorId parse_estimator(std::string_view name);
std::string_view estimator_name(EstimatorId id);

/// Desk-scale resource limits. Requests beyond them are refused with
/// CapExceeded.
struct ResourceCaps {
  std::size_t max_n = 4000;
  std::uint64_t max_budget = 1'000'000'000;
  std::size_t max_mle_n = 8;
  std::size_t max_sieve_n = 7;
};

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::ScalingN;
  std::vector<std::size_t> n_values;
  /// Budgets as fractions alpha = N / C(n,2) (= p without replacement)...
  std::vector<double> alphas;
  /// ...or, when nonempty, as absolute draw counts N.
  std::vector<std::uint64_t> budgets;
  std::vector<double> lambdas;
  std::vector<SamplingModel> models;
  std::vector<EstimatorId> estimators;
  std::size_t replicates = 10;
  std::uint64_t master_seed = 1;
  /// Stage count T; nullopt means floor(log log n), at least 1.
  std::optional<std::size_t> stages;
  MsConfig ms;
  /// Estimate lambda_hat from two extra half-budget samples instead of using
  /// the true lambda.
  bool estimate_lambda = false;
  /// Latent order: identity (needed for region pictures) or random per replicate.
  bool identity_truth = false;
  std::size_t workers = 0;  // 0: NOISYSORT_WORKERS or hardware concurrency
  ResourceCaps caps;
  std::filesystem::path output_csv;
  std::filesystem::path regions_dir;
  bool timing = false;  // append runtime_ms to the CSV (not reproducible)

  /// Grid and estimator defaults for a kind (shrunk to desk
  /// scale; `full_scale` restores n up to 10^4).
  static ExperimentSpec defaults(ExperimentKind kind, bool full_scale = false);

  /// Throws PreconditionError for an empty grid or replicates < 1, and
  /// CapExceeded for requests beyond `caps`.
  void validate() const;
};

struct ResultRow {
  ExperimentKind kind = ExperimentKind::ScalingN;
  std::size_t n = 0;
  SamplingModel model = SamplingModel::WithReplacement;
  double budget = 0;  // p without replacement, N with replacement
  double alpha = 0;   // expected comparisons / C(n,2)
  double lambda = 0;
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  EstimatorId estimator = EstimatorId::Ms;
  std::uint64_t d_kt = 0;
  std::uint64_t l1 = 0;
  std::uint64_t linf = 0;
  std::optional<double> lambda_hat;
  std::size_t stages = 0;  // T used by MS (0 for other estimators)
  std::uint64_t region_final = 0;  // |R^(T)| for MS
  std::uint64_t misclassified = 0;  // wrongly certain pairs over all MS stages
  double runtime_ms = 0;
};

/// One MS state sequence kept for region export (first replicate of each
/// cell when regions are requested).
struct RegionCapture {
  std::size_t n = 0;
  SamplingModel model = SamplingModel::WithReplacement;
  double alpha = 0;
  double lambda = 0;
  std::vector<MsState> states;
};

struct ExperimentOutput {
  std::vector<ResultRow> rows;
  std::vector<RegionCapture> regions;
};

/// floor(log log n), at least 1.
std::size_t default_stage_count(std::size_t n);

/// Runs every grid cell x sampling model x replicate. Rows come back in
/// deterministic (cell, model, replicate, estimator) order regardless of the
/// worker count.
ExperimentOutput run_experiment(const ExperimentSpec& spec);

/// Fixed column order:
/// kind,n,model,budget,alpha,lambda,replicate,seed,estimator,stages,d_kt,l1,linf,
/// lambda_hat,region_final,misclassified[,runtime_ms]
void write_rows_csv(std::ostream& out, std::span<const ResultRow> rows, bool timing = false);

/// Writes stage_<t>.pbm for every state; returns the paths written.
std::vector<std::filesystem::path> emit_regions(std::span<const MsState> states,
                                                const std::filesystem::path& out_dir);

struct DistanceSummary {
  double mean = 0, std = 0, min = 0, max = 0;
};

struct AggregateRow {
  ExperimentKind kind = ExperimentKind::ScalingN;
  std::size_t n = 0;
  SamplingModel model = SamplingModel::WithReplacement;
  double alpha = 0;
  double lambda = 0;
  EstimatorId estimator = EstimatorId::Ms;
  std::size_t count = 0;
  DistanceSummary d_kt, l1, linf;
};

/// One aggregate per (kind, n, model, alpha, lambda, estimator), sorted by
/// that key. Std is the sample standard deviation (0 for a single row).
std::vector<AggregateRow> summarize(std::span<const ResultRow> rows);

void write_summary_csv(std::ostream& out, std::span<const AggregateRow> rows);

/// Least-squares slope of log y against log x.
double fit_loglog_slope(std::span<const double> x, std::span<const double> y);

/// Flat `key = value` configuration (one per line, `#` comments).
using ConfigMap = std::map<std::string, std::string>;
ConfigMap parse_config(std::istream& in);
ConfigMap load_config(const std::filesystem::path& path);

/// Applies documented keys to `spec`; unknown keys throw PreconditionError.
/// Keys: kind, n, alpha, budget, lambda, models, estimators, replicates, seed,
/// stages, c0, c1, threshold_constant (number or "literal"), lambda_hat,
/// estimate_lambda, identity_truth, workers, max_n, max_budget, out,
/// regions_dir, timing.
void apply_config(ExperimentSpec& spec, const ConfigMap& config);

}  // namespace noisysort
