#include "noisysort/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>
#include <tuple>

#include "noisysort/dataset_io.hpp"
#include "noisysort/errors.hpp"
#include "noisysort/rng.hpp"

namespace noisysort {

namespace {

constexpr std::pair<ExperimentKind, std::string_view> kKindNames[] = {
    {ExperimentKind::ScalingN, "scaling_n"},
    {ExperimentKind::ScalingBudget, "scaling_budget"},
    {ExperimentKind::RegionSnapshot, "region_snapshot"},
    {ExperimentKind::LambdaAccuracy, "lambda_accuracy"},
    {ExperimentKind::MleSmallN, "mle_small_n"},
};

constexpr std::pair<EstimatorId, std::string_view> kEstimatorNames[] = {
    {EstimatorId::Ms, "ms"},
    {EstimatorId::Borda, "borda"},
    {EstimatorId::Random, "random"},
    {EstimatorId::BruteMle, "brute_mle"},
    {EstimatorId::SieveMle, "sieve_mle"},
};

double pair_count(std::size_t n) { return 0.5 * static_cast<double>(n) * static_cast<double>(n - 1); }

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct Cell {
  std::size_t n;
  std::optional<std::uint64_t> draws;  // absolute budget
  double alpha;
  double lambda;
};

std::vector<Cell> grid_cells(const ExperimentSpec& spec) {
  std::vector<Cell> cells;
  for (const std::size_t n : spec.n_values) {
    if (!spec.budgets.empty()) {
      for (const std::uint64_t b : spec.budgets) {
        for (const double l : spec.lambdas) cells.push_back({n, b, static_cast<double>(b) / pair_count(n), l});
      }
    } else {
      for (const double a : spec.alphas) {
        for (const double l : spec.lambdas) cells.push_back({n, std::nullopt, a, l});
      }
    }
  }
  return cells;
}

std::uint64_t cell_draws(const Cell& c) {
  return c.draws.value_or(static_cast<std::uint64_t>(std::llround(c.alpha * pair_count(c.n))));
}

struct TaskResult {
  std::vector<ResultRow> rows;
  std::optional<RegionCapture> region;
};

std::size_t resolve_workers(std::size_t requested, std::size_t tasks) {
  std::size_t w = requested;
  if (w == 0) {
    if (const char* env = std::getenv("NOISYSORT_WORKERS")) {
      w = static_cast<std::size_t>(std::strtoull(env, nullptr, 10));
    }
  }
  if (w == 0) w = std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(w, tasks));
}

TaskResult run_task(const ExperimentSpec& spec, const Cell& cell, std::size_t cell_index,
                    SamplingModel model, std::size_t replicate, bool capture) {
  using Clock = std::chrono::steady_clock;
  const std::size_t n = cell.n;
  const std::uint64_t seed = derive_seed(spec.master_seed, cell_index, replicate);
  const Permutation pi_star =
      spec.identity_truth ? Permutation::identity(n) : random_permutation(n, derive_seed(seed, 0));
  const ProbabilityMatrix m = ProbabilityMatrix::star(n, cell.lambda);
  const std::size_t stages = spec.stages.value_or(default_stage_count(n));
  const std::uint64_t model_stream = model == SamplingModel::WithReplacement ? 0 : 1;
  const std::uint64_t data_seed = derive_seed(seed, 1, model_stream);

  ResultRow base;
  base.kind = spec.kind;
  base.n = n;
  base.model = model;
  base.lambda = cell.lambda;
  base.replicate = replicate;
  base.seed = seed;

  std::vector<ComparisonDataset> stage_data;
  SamplingTag tag;
  if (model == SamplingModel::WithReplacement) {
    const std::uint64_t draws = cell_draws(cell);
    tag = SamplingTag::with_replacement(draws);
    const ModelParams params{pi_star, m, tag};
    stage_data = split_with_replacement(params, stage_budgets(draws, stages), derive_seed(data_seed, 0));
    base.budget = static_cast<double>(draws);
    base.alpha = static_cast<double>(draws) / pair_count(n);
  } else {
    const double p = cell.alpha;
    tag = SamplingTag::without_replacement(p);
    const auto full = sample_without_replacement(pi_star, m, p, derive_seed(data_seed, 0));
    stage_data = split_without_replacement(full, stages, derive_seed(data_seed, 1));
    base.budget = p;
    base.alpha = p;
  }
  const ComparisonDataset pooled = stage_data.size() == 1 ? stage_data.front() : merge(stage_data);

  double lambda_hat = spec.ms.lambda_hat_override.value_or(cell.lambda);
  if (spec.estimate_lambda) {
    ComparisonDataset pilot, holdout;
    if (model == SamplingModel::WithReplacement) {
      const std::uint64_t half = std::max<std::uint64_t>(1, cell_draws(cell) / 2);
      pilot = sample_with_replacement(pi_star, m, half, derive_seed(data_seed, 2));
      holdout = sample_with_replacement(pi_star, m, half, derive_seed(data_seed, 3));
    } else {
      pilot = sample_without_replacement(pi_star, m, cell.alpha / 2, derive_seed(data_seed, 2));
      holdout = sample_without_replacement(pi_star, m, cell.alpha / 2, derive_seed(data_seed, 3));
    }
    lambda_hat = estimate_lambda(pilot, holdout).value;
  }

  TaskResult out;
  for (const EstimatorId est : spec.estimators) {
    ResultRow row = base;
    row.estimator = est;
    const auto start = Clock::now();
    Permutation estimate = Permutation::identity(n);
    switch (est) {
      case EstimatorId::Ms: {
        MsConfig config = spec.ms;
        config.stages = stages;
        config.lambda_hat_override.reset();
        config.record_states = true;
        MsResult result = ms_sort(stage_data, lambda_hat, config);
        estimate = result.estimate;
        row.lambda_hat = result.lambda_hat;
        row.stages = stages;
        row.region_final = result.states.back().region_size();
        for (const MsState& s : result.states) row.misclassified += misclassified_pairs(s, pi_star);
        if (capture) {
          out.region = RegionCapture{n, model, base.alpha, cell.lambda, std::move(result.states)};
        }
        break;
      }
      case EstimatorId::Borda:
        estimate = borda_sort(pooled);
        break;
      case EstimatorId::Random:
        estimate = random_permutation(n, derive_seed(seed, 2, model_stream));
        break;
      case EstimatorId::BruteMle:
        estimate = brute_force_mle(pooled, spec.caps.max_mle_n);
        break;
      case EstimatorId::SieveMle: {
        const PackingSet net =
            greedy_maximal_packing(n, sieve_radius(tag, n, cell.lambda), std::nullopt, spec.caps.max_sieve_n);
        estimate = sieve_mle(pooled, net);
        break;
      }
    }
    row.runtime_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    row.d_kt = kendall_tau(estimate, pi_star);
    row.l1 = l1_distance(estimate, pi_star);
    row.linf = linf_distance(estimate, pi_star);
    out.rows.push_back(std::move(row));
  }
  return out;
}

DistanceSummary describe(const std::vector<double>& v) {
  DistanceSummary s;
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  double sum = 0;
  for (const double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0;
    for (const double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

}  // namespace

ExperimentKind parse_experiment_kind(std::string_view name) {
  for (const auto& [kind, label] : kKindNames) {
    if (label == name) return kind;
  }
  // CLI spellings
  if (name == "scaling-n") return ExperimentKind::ScalingN;
  if (name == "scaling-budget") return ExperimentKind::ScalingBudget;
  if (name == "regions") return ExperimentKind::RegionSnapshot;
  if (name == "lambda") return ExperimentKind::LambdaAccuracy;
  if (name == "mle-small") return ExperimentKind::MleSmallN;
  throw PreconditionError("unknown experiment kind '" + std::string(name) + "'");
}

std::string_view experiment_kind_name(ExperimentKind kind) {
  for (const auto& [k, label] : kKindNames) {
    if (k == kind) return label;
  }
  return "?";
}

EstimatorId parse_estimator(std::string_view name) {
  for (const auto& [id, label] : kEstimatorNames) {
    if (label == name) return id;
  }
  throw PreconditionError("unknown estimator '" + std::string(name) + "'");
}

std::string_view estimator_name(EstimatorId id) {
  for (const auto& [e, label] : kEstimatorNames) {
    if (e == id) return label;
  }
  return "?";
}

ExperimentSpec ExperimentSpec::defaults(ExperimentKind kind, bool full_scale) {
  ExperimentSpec s;
  s.kind = kind;
  s.lambdas = {0.25};
  s.models = {SamplingModel::WithReplacement, SamplingModel::WithoutReplacement};
  s.estimators = {EstimatorId::Ms, EstimatorId::Borda, EstimatorId::Random};
  s.replicates = 10;
  if (full_scale) s.caps.max_n = 10000;
  switch (kind) {
    case ExperimentKind::ScalingN:
      s.n_values = full_scale ? std::vector<std::size_t>{1000, 2000, 3000, 4000, 5000, 6000, 7000, 8000, 9000, 10000}
                              : std::vector<std::size_t>{500, 1000, 2000, 4000};
      s.alphas = {0.1};
      break;
    case ExperimentKind::ScalingBudget:
      s.n_values = {full_scale ? std::size_t{10000} : std::size_t{2000}};
      s.alphas = {0.01, 0.02, 0.05, 0.1};
      break;
    case ExperimentKind::RegionSnapshot:
      s.n_values = {full_scale ? std::size_t{10000} : std::size_t{2000}};
      s.alphas = {1.0};
      s.models = {SamplingModel::WithReplacement};
      s.estimators = {EstimatorId::Ms};
      s.replicates = 1;
      s.stages = 3;
      s.identity_truth = true;
      break;
    case ExperimentKind::LambdaAccuracy:
      s.n_values = {500};
      s.budgets = {1'000'000};
      s.models = {SamplingModel::WithReplacement};
      s.estimators = {EstimatorId::Ms};
      s.estimate_lambda = true;
      break;
    case ExperimentKind::MleSmallN:
      s.n_values = {5, 6};
      s.alphas = {1.0};
      s.estimators = {EstimatorId::BruteMle, EstimatorId::SieveMle, EstimatorId::Ms, EstimatorId::Borda,
                      EstimatorId::Random};
      break;
  }
  return s;
}

void ExperimentSpec::validate() const {
  if (n_values.empty() || (alphas.empty() && budgets.empty()) || lambdas.empty() || models.empty() ||
      estimators.empty()) {
    throw PreconditionError("experiment grid is empty");
  }
  if (replicates < 1) throw PreconditionError("replicates must be >= 1");
  if (stages && *stages < 1) throw PreconditionError("stages must be >= 1");
  ms.validate();
  for (const double l : lambdas) {
    if (!(l > 0 && l < 0.5)) throw PreconditionError("lambda must lie in (0, 1/2)");
  }
  for (const double a : alphas) {
    if (!(a > 0)) throw PreconditionError("alpha must be positive");
  }
  const bool has_mle = std::find(estimators.begin(), estimators.end(), EstimatorId::BruteMle) != estimators.end();
  const bool has_sieve = std::find(estimators.begin(), estimators.end(), EstimatorId::SieveMle) != estimators.end();
  for (const Cell& c : grid_cells(*this)) {
    if (c.n < 2) throw PreconditionError("n must be >= 2");
    if (estimate_lambda && c.n < 4) throw PreconditionError("lambda estimation needs n >= 4");
    if (c.n > caps.max_n) throw CapExceeded("n", c.n, caps.max_n);
    if (has_mle && c.n > caps.max_mle_n) throw CapExceeded("brute-force MLE n", c.n, caps.max_mle_n);
    if (has_sieve && c.n > caps.max_sieve_n) throw CapExceeded("sieve MLE n", c.n, caps.max_sieve_n);
    const std::uint64_t draws = cell_draws(c);
    if (draws > caps.max_budget) throw CapExceeded("budget N", draws, caps.max_budget);
    const std::size_t t = stages.value_or(default_stage_count(c.n));
    for (const SamplingModel m : models) {
      if (m == SamplingModel::WithReplacement && draws < t) {
        throw PreconditionError("budget N must be at least the stage count");
      }
      if (m == SamplingModel::WithoutReplacement && c.alpha > 1) {
        throw PreconditionError("observation probability alpha must be <= 1 without replacement");
      }
    }
  }
}

std::size_t default_stage_count(std::size_t n) {
  if (n < 3) return 1;
  const double t = std::floor(std::log(std::log(static_cast<double>(n))));
  return t < 1 ? 1 : static_cast<std::size_t>(t);
}

ExperimentOutput run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const std::vector<Cell> cells = grid_cells(spec);
  struct TaskKey {
    std::size_t cell, model, replicate;
  };
  std::vector<TaskKey> keys;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t m = 0; m < spec.models.size(); ++m) {
      for (std::size_t r = 0; r < spec.replicates; ++r) keys.push_back({c, m, r});
    }
  }
  const bool want_regions = spec.kind == ExperimentKind::RegionSnapshot || !spec.regions_dir.empty();
  const bool has_ms = std::find(spec.estimators.begin(), spec.estimators.end(), EstimatorId::Ms) != spec.estimators.end();

  std::vector<TaskResult> results(keys.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < keys.size();) {
      const TaskKey& key = keys[k];
      const bool capture = want_regions && has_ms && key.replicate == 0;
      results[k] = run_task(spec, cells[key.cell], key.cell, spec.models[key.model], key.replicate, capture);
    }
  };
  const std::size_t workers = resolve_workers(spec.workers, keys.size());
  if (workers == 1) {
    worker();
  } else {
    // Exceptions escaping a jthread would terminate; collect the first one.
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          try {
            worker();
          } catch (...) {
            const std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = keys.size();
          }
        });
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  ExperimentOutput out;
  for (TaskResult& r : results) {
    for (ResultRow& row : r.rows) out.rows.push_back(std::move(row));
    if (r.region) out.regions.push_back(std::move(*r.region));
  }
  return out;
}

void write_rows_csv(std::ostream& out, std::span<const ResultRow> rows, bool timing) {
  out << "kind,n,model,budget,alpha,lambda,replicate,seed,estimator,stages,d_kt,l1,linf,lambda_hat,"
         "region_final,misclassified";
  if (timing) out << ",runtime_ms";
  out << '\n';
  for (const ResultRow& r : rows) {
    out << experiment_kind_name(r.kind) << ',' << r.n << ','
        << (r.model == SamplingModel::WithReplacement ? "with" : "without") << ',' << format_double(r.budget)
        << ',' << format_double(r.alpha) << ',' << format_double(r.lambda) << ',' << r.replicate << ','
        << r.seed << ',' << estimator_name(r.estimator) << ',' << r.stages << ',' << r.d_kt << ',' << r.l1
        << ',' << r.linf << ',' << (r.lambda_hat ? format_double(*r.lambda_hat) : std::string()) << ','
        << r.region_final << ',' << r.misclassified;
    if (timing) out << ',' << format_double(r.runtime_ms);
    out << '\n';
  }
}

std::vector<std::filesystem::path> emit_regions(std::span<const MsState> states,
                                                const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  for (const MsState& s : states) {
    const UncertaintyRegion region = uncertainty_region(s);
    const auto path = out_dir / ("stage_" + std::to_string(s.stage) + ".pbm");
    std::ofstream file(path);
    if (!file) throw std::runtime_error("cannot write " + path.string());
    write_pbm(file, s.n, s.n, region.bitmap);
    if (!file) throw std::runtime_error("error writing " + path.string());
    written.push_back(path);
  }
  return written;
}

std::vector<AggregateRow> summarize(std::span<const ResultRow> rows) {
  if (rows.empty()) throw PreconditionError("summarize: no rows");
  using Key = std::tuple<ExperimentKind, std::size_t, SamplingModel, double, double, EstimatorId>;
  struct Acc {
    std::vector<double> kt, l1, linf;
  };
  std::map<Key, Acc> groups;
  for (const ResultRow& r : rows) {
    Acc& a = groups[Key{r.kind, r.n, r.model, r.alpha, r.lambda, r.estimator}];
    a.kt.push_back(static_cast<double>(r.d_kt));
    a.l1.push_back(static_cast<double>(r.l1));
    a.linf.push_back(static_cast<double>(r.linf));
  }
  std::vector<AggregateRow> out;
  for (const auto& [key, acc] : groups) {
    AggregateRow a;
    std::tie(a.kind, a.n, a.model, a.alpha, a.lambda, a.estimator) = key;
    a.count = acc.kt.size();
    a.d_kt = describe(acc.kt);
    a.l1 = describe(acc.l1);
    a.linf = describe(acc.linf);
    out.push_back(a);
  }
  return out;
}

void write_summary_csv(std::ostream& out, std::span<const AggregateRow> rows) {
  out << "kind,n,model,alpha,lambda,estimator,count";
  for (const char* d : {"d_kt", "l1", "linf"}) {
    for (const char* s : {"mean", "std", "min", "max"}) out << ',' << d << '_' << s;
  }
  out << '\n';
  for (const AggregateRow& a : rows) {
    out << experiment_kind_name(a.kind) << ',' << a.n << ','
        << (a.model == SamplingModel::WithReplacement ? "with" : "without") << ',' << format_double(a.alpha)
        << ',' << format_double(a.lambda) << ',' << estimator_name(a.estimator) << ',' << a.count;
    for (const DistanceSummary* d : {&a.d_kt, &a.l1, &a.linf}) {
      out << ',' << format_double(d->mean) << ',' << format_double(d->std) << ',' << format_double(d->min)
          << ',' << format_double(d->max);
    }
    out << '\n';
  }
}

double fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionMismatch(x.size(), y.size());
  if (x.size() < 2) throw PreconditionError("slope fit needs at least two points");
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0 && y[k] > 0)) throw PreconditionError("log-log fit needs positive values");
    mx += std::log(x[k]);
    my += std::log(y[k]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = std::log(x[k]) - mx;
    sxy += dx * (std::log(y[k]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0) throw PreconditionError("slope fit needs distinct x values");
  return sxy / sxx;
}

}  // namespace noisysort
