// Command-line front end: data generation, multistage sorting, combinatorics
// checks, closed-form theory quantities and the experiment harness.

#include <charconv>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "noisysort/combinatorics.hpp"
#include "noisysort/dataset_io.hpp"
#include "noisysort/errors.hpp"
#include "noisysort/estimators.hpp"
#include "noisysort/harness.hpp"
#include "noisysort/model.hpp"
#include "noisysort/rng.hpp"
#include "noisysort/theory.hpp"

namespace ns = noisysort;

namespace {

constexpr int kUsageError = 1;
constexpr int kCapRefusal = 2;

struct GenerateOptions {
  std::size_t n = 0;
  double lambda = 0.25;
  std::string model = "with";
  double budget = 0;
  std::uint64_t seed = 1;
  std::string truth_file;
  bool random_truth = false;
};

void add_generate_options(CLI::App* app, GenerateOptions& g) {
  app->add_option("--n", g.n, "Number of items");
  app->add_option("--lambda", g.lambda, "Signal strength in (0, 1/2)");
  app->add_option("--model", g.model, "Sampling model: with | without")->check(CLI::IsMember({"with", "without"}));
  app->add_option("--budget", g.budget, "Observation probability p (without) or draw count N (with)");
  app->add_option("--seed", g.seed, "Random seed");
  app->add_option("--truth", g.truth_file, "Latent permutation file (default identity); run-ms reports distances to it");
  app->add_flag("--random-truth", g.random_truth, "Draw the latent permutation uniformly from the seed");
}

ns::Permutation truth_for(const GenerateOptions& g) {
  if (!g.truth_file.empty()) {
    auto p = ns::load_permutation(g.truth_file);
    if (p.size() != g.n) throw ns::DimensionMismatch(p.size(), g.n);
    return p;
  }
  if (g.random_truth) return ns::random_permutation(g.n, ns::derive_seed(g.seed, 99));
  return ns::Permutation::identity(g.n);
}

ns::SamplingTag tag_for(const GenerateOptions& g) {
  if (g.n < 2) throw ns::PreconditionError("--n must be at least 2");
  if (ns::SamplingTag::parse_model(g.model) == ns::SamplingModel::WithReplacement) {
    if (g.budget < 1 || g.budget != static_cast<double>(static_cast<std::uint64_t>(g.budget))) {
      throw ns::PreconditionError("--budget must be a positive integer draw count with replacement");
    }
    return ns::SamplingTag::with_replacement(static_cast<std::uint64_t>(g.budget));
  }
  return ns::SamplingTag::without_replacement(g.budget);
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot write " + path);
  return file;
}

// Shortest representation that reads back to the same double.
std::string num(double v) {
  char buf[64];
  return std::string(buf, std::to_chars(buf, buf + sizeof buf, v).ptr);
}

std::string tag_dir_name(const ns::RegionCapture& c) {
  std::ostringstream s;
  s << "n" << c.n << "_" << (c.model == ns::SamplingModel::WithReplacement ? "with" : "without") << "_alpha"
    << c.alpha << "_lambda" << c.lambda;
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noisy sorting: sampling, multistage sorting and permutation combinatorics"};
  app.require_subcommand(1);

  // simulate
  GenerateOptions sim;
  std::string sim_out;
  auto* simulate = app.add_subcommand("simulate", "Sample a comparison dataset");
  add_generate_options(simulate, sim);
  simulate->get_option("--n")->required();
  simulate->get_option("--budget")->required();
  simulate->add_option("--out", sim_out, "Dataset file (default stdout)");

  // run-ms
  std::vector<std::string> ms_in;
  bool ms_generate = false;
  GenerateOptions gen;
  std::size_t ms_stages = 0;
  ns::MsConfig ms_config;
  std::optional<double> ms_lambda_hat;
  std::string ms_threshold;
  std::string ms_pilot, ms_holdout, ms_out, ms_regions;
  std::uint64_t ms_split_seed = 1;
  auto* run_ms = app.add_subcommand("run-ms", "Run multistage sorting on stage samples");
  run_ms->add_option("--in", ms_in, "Stage dataset files (one per stage, or one file split into T stages)");
  run_ms->add_flag("--generate", ms_generate, "Generate the data from --n/--lambda/--model/--budget/--seed");
  add_generate_options(run_ms, gen);
  run_ms->add_option("--T", ms_stages, "Number of stages (default: number of --in files, or floor(log log n))");
  run_ms->add_option("--c0", ms_config.c0, "Deviation constant C0");
  run_ms->add_option("--c1", ms_config.c1, "Stage-gate constant C1");
  run_ms->add_option("--lambda-hat", ms_lambda_hat, "Signal strength used by the scores");
  run_ms->add_option("--threshold-constant", ms_threshold, "Threshold multiplier, or 'literal' for 10 + 2 C0");
  run_ms->add_option("--pilot", ms_pilot, "Pilot dataset for estimating lambda_hat");
  run_ms->add_option("--holdout", ms_holdout, "Holdout dataset for estimating lambda_hat");
  run_ms->add_option("--split-seed", ms_split_seed, "Seed for splitting a single input into stages");
  run_ms->add_option("--out", ms_out, "Output permutation file (default stdout)");
  run_ms->add_option("--regions-dir", ms_regions, "Write one P1 bitmap per stage here");

  // count-inversions
  std::size_t ci_n = 0;
  std::uint64_t ci_k = 0;
  std::string ci_perm;
  auto* count_inv = app.add_subcommand("count-inversions", "Count permutations with at most k inversions");
  count_inv->add_option("--n", ci_n, "Number of items");
  count_inv->add_option("--k", ci_k, "Inversion budget");
  count_inv->add_option("--perm", ci_perm, "Instead: count the inversions of this permutation");

  // entropy-check
  std::size_t ec_n = 0;
  std::uint64_t ec_r = 0, ec_eps = 0;
  auto* entropy = app.add_subcommand("entropy-check", "Metric entropy bounds of a Kendall tau ball");
  entropy->add_option("--n", ec_n, "Number of items")->required();
  entropy->add_option("--r", ec_r, "Ball radius")->required();
  entropy->add_option("--eps", ec_eps, "Packing scale")->required();

  // theory
  std::string th_op, th_model = "with", th_rate;
  std::size_t th_n = 0;
  double th_budget = 0, th_lambda = 0.25, th_p = 0.5, th_q = 0.25, th_r = 0, th_s = 0;
  std::uint64_t th_trials = 0, th_draws = 0, th_seed = 1;
  std::string th_pi, th_sigma;
  auto* theory = app.add_subcommand("theory", "Closed-form information-theoretic quantities");
  theory->add_option("--op", th_op, "kl | tail | rate | bernoulli-kl")
      ->required()
      ->check(CLI::IsMember({"kl", "tail", "rate", "bernoulli-kl"}));
  theory->add_option("--pi", th_pi, "kl: first permutation");
  theory->add_option("--sigma", th_sigma, "kl: second permutation");
  theory->add_option("--model", th_model, "kl: with | without")->check(CLI::IsMember({"with", "without"}));
  theory->add_option("--budget", th_budget, "kl/rate: p or N");
  theory->add_option("--lambda", th_lambda, "Signal strength");
  theory->add_option("--p", th_p, "bernoulli-kl/tail: success probability");
  theory->add_option("--q", th_q, "bernoulli-kl: second probability");
  theory->add_option("--trials", th_trials, "tail: N");
  theory->add_option("--r", th_r, "tail: lower level r < p");
  theory->add_option("--s", th_s, "tail: upper level s > p");
  theory->add_option("--draws", th_draws, "tail: Monte-Carlo draws (0 skips)");
  theory->add_option("--seed", th_seed, "tail: Monte-Carlo seed");
  theory->add_option("--rate", th_rate, "rate: minimax_O1 | minimax_O2 | ms_upper | lower_O1 | lower_O2");
  theory->add_option("--n", th_n, "rate: number of items");

  // experiment
  std::string ex_kind, ex_config, ex_out, ex_summary, ex_regions, ex_threshold, ex_stages;
  bool ex_full = false, ex_timing = false, ex_estimate_lambda = false;
  std::vector<std::size_t> ex_n;
  std::vector<double> ex_alpha, ex_lambda;
  std::vector<std::uint64_t> ex_budget;
  std::vector<std::string> ex_models, ex_estimators;
  std::optional<std::size_t> ex_replicates, ex_workers;
  std::optional<std::uint64_t> ex_seed;
  std::optional<double> ex_c0, ex_c1;
  auto* experiment = app.add_subcommand("experiment", "Run a simulation grid and write CSV rows");
  experiment->add_option("kind", ex_kind, "scaling-n | scaling-budget | regions | lambda | mle-small")
      ->required()
      ->check(CLI::IsMember({"scaling-n", "scaling-budget", "regions", "lambda", "mle-small"}));
  experiment->add_option("--config", ex_config, "Flat key = value configuration file");
  experiment->add_flag("--full-scale", ex_full, "Allow and use the n up to 10^4 grid");
  experiment->add_option("--n", ex_n, "Item counts")->delimiter(',');
  experiment->add_option("--alpha", ex_alpha, "Budgets as N / C(n,2) (p without replacement)")->delimiter(',');
  experiment->add_option("--budget", ex_budget, "Absolute draw counts N")->delimiter(',');
  experiment->add_option("--lambda", ex_lambda, "Signal strengths")->delimiter(',');
  experiment->add_option("--models", ex_models, "with,without")->delimiter(',');
  experiment->add_option("--estimators", ex_estimators, "ms,borda,random,brute_mle,sieve_mle")->delimiter(',');
  experiment->add_option("--replicates", ex_replicates, "Replicates per cell");
  experiment->add_option("--seed", ex_seed, "Master seed");
  experiment->add_option("--T", ex_stages, "Stage count, or 'auto' for floor(log log n)");
  experiment->add_option("--c0", ex_c0, "Deviation constant C0");
  experiment->add_option("--c1", ex_c1, "Stage-gate constant C1");
  experiment->add_option("--threshold-constant", ex_threshold, "Threshold multiplier, or 'literal'");
  experiment->add_flag("--estimate-lambda", ex_estimate_lambda, "Estimate lambda_hat from extra samples");
  experiment->add_option("--workers", ex_workers, "Worker threads (default NOISYSORT_WORKERS or all cores)");
  experiment->add_option("--out", ex_out, "Row CSV (default stdout)");
  experiment->add_option("--summary", ex_summary, "Aggregate CSV");
  experiment->add_option("--regions-dir", ex_regions, "Write per-stage P1 bitmaps of the first replicate");
  experiment->add_flag("--timing", ex_timing, "Append runtime_ms (makes output non-reproducible)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*simulate) {
      const auto tag = tag_for(sim);
      const ns::ModelParams params{truth_for(sim), ns::ProbabilityMatrix::star(sim.n, sim.lambda), tag};
      const auto data = ns::sample(params, sim.seed);
      std::ofstream file;
      ns::write_dataset(open_out(sim_out, file), data);
    } else if (*run_ms) {
      if (ms_generate == !ms_in.empty()) throw CLI::ValidationError("run-ms", "give exactly one of --in or --generate");
      if (!ms_threshold.empty()) {
        if (ms_threshold == "literal") {
          ms_config.threshold_constant.reset();
        } else {
          ms_config.threshold_constant = std::stod(ms_threshold);
        }
      }
      std::vector<ns::ComparisonDataset> stages;
      std::optional<ns::Permutation> truth;
      double lambda_hat = gen.lambda;
      if (ms_generate) {
        const auto tag = tag_for(gen);
        const std::size_t t = ms_stages ? ms_stages : ns::default_stage_count(gen.n);
        const ns::ModelParams params{truth_for(gen), ns::ProbabilityMatrix::star(gen.n, gen.lambda), tag};
        truth = params.pi_star;
        if (tag.model == ns::SamplingModel::WithReplacement) {
          const auto n_draws = static_cast<std::uint64_t>(tag.budget);
          stages = ns::split_with_replacement(params, ns::stage_budgets(n_draws, t), gen.seed);
        } else {
          stages = ns::split_without_replacement(ns::sample(params, gen.seed), t, ns::derive_seed(gen.seed, 1));
        }
      } else {
        for (const auto& f : ms_in) stages.push_back(ns::load_dataset(f));
        if (ms_stages && stages.size() == 1 && ms_stages > 1) {
          stages = ns::split_without_replacement(stages.front(), ms_stages, ms_split_seed);
        } else if (ms_stages && ms_stages != stages.size()) {
          throw ns::PreconditionError("--T does not match the number of --in files");
        }
        if (!gen.truth_file.empty()) truth = ns::load_permutation(gen.truth_file);
        if (!ms_lambda_hat && ms_pilot.empty()) {
          throw CLI::ValidationError("run-ms", "--in needs --lambda-hat or --pilot/--holdout");
        }
      }
      if (!ms_pilot.empty() || !ms_holdout.empty()) {
        if (ms_pilot.empty() || ms_holdout.empty()) throw CLI::ValidationError("run-ms", "--pilot needs --holdout");
        const auto est = ns::estimate_lambda(ns::load_dataset(ms_pilot), ns::load_dataset(ms_holdout));
        lambda_hat = est.value;
        std::cerr << "lambda_hat " << est.value << " (raw " << est.raw << ", |I| " << est.index_set_size << ")\n";
      }
      if (ms_lambda_hat) lambda_hat = *ms_lambda_hat;
      ms_config.stages = stages.size();
      ms_config.record_states = !ms_regions.empty();
      const auto result = ns::ms_sort(stages, lambda_hat, ms_config);
      std::ofstream file;
      open_out(ms_out, file) << result.estimate.to_string() << '\n';
      if (!ms_regions.empty()) {
        for (const auto& p : ns::emit_regions(result.states, ms_regions)) std::cerr << "wrote " << p.string() << '\n';
      }
      if (truth) {
        std::cerr << "d_kt " << ns::kendall_tau(result.estimate, *truth) << " l1 "
                  << ns::l1_distance(result.estimate, *truth) << " linf "
                  << ns::linf_distance(result.estimate, *truth) << '\n';
      }
    } else if (*count_inv) {
      if (!ci_perm.empty()) {
        const auto p = ns::Permutation::parse(ci_perm);
        std::cout << ns::count_inversions(p.values()) << '\n';
      } else {
        if (!count_inv->count("--n") || !count_inv->count("--k")) {
          throw CLI::ValidationError("count-inversions", "--n and --k are required");
        }
        std::cout << ns::count_at_most_k_inversions(ci_n, ci_k).to_string() << '\n';
      }
    } else if (*entropy) {
      const auto rep = ns::entropy_bounds(ec_n, ec_r, ec_eps);
      std::cout << "n,r,eps,prop_lower,prop_upper,greedy_size,log_greedy_size,within_bounds\n";
      std::cout << std::setprecision(10) << rep.n << ',' << rep.r << ',' << rep.epsilon << ',' << rep.prop_lower
                << ',' << rep.prop_upper << ',';
      if (rep.greedy_size) {
        std::cout << *rep.greedy_size << ',' << *rep.log_greedy_size << ',' << (*rep.within_bounds ? 1 : 0);
      } else {
        std::cout << ",,";
      }
      std::cout << '\n';
    } else if (*theory) {
      if (th_op == "bernoulli-kl") {
        std::cout << "p,q,kl\n" << num(th_p) << ',' << num(th_q) << ',' << num(ns::bernoulli_kl(th_p, th_q)) << '\n';
      } else if (th_op == "kl") {
        const auto pi = ns::Permutation::parse(th_pi);
        const auto sigma = ns::Permutation::parse(th_sigma);
        const auto tag = ns::SamplingTag::parse_model(th_model) == ns::SamplingModel::WithReplacement
                             ? ns::SamplingTag::with_replacement(static_cast<std::uint64_t>(th_budget))
                             : ns::SamplingTag::without_replacement(th_budget);
        std::cout << "model,budget,lambda,d_kt,kl\n"
                  << th_model << ',' << num(th_budget) << ',' << num(th_lambda) << ',' << ns::kendall_tau(pi, sigma) << ','
                  << num(ns::model_kl(pi, sigma, tag, th_lambda)) << '\n';
      } else if (th_op == "tail") {
        const auto b = ns::binomial_tail_bounds(th_trials, th_p, th_r, th_s);
        std::cout << "N,p,r,s,lower_bound,upper_bound";
        if (th_draws) std::cout << ",lower_empirical,upper_empirical";
        std::cout << '\n'
                  << th_trials << ',' << num(th_p) << ',' << num(th_r) << ',' << num(th_s) << ',' << num(b.lower_tail) << ','
                  << num(b.upper_tail);
        if (th_draws) {
          const auto e = ns::empirical_binomial_tails(th_trials, th_p, th_r, th_s, th_draws, th_seed);
          std::cout << ',' << num(e.lower_tail) << ',' << num(e.upper_tail);
        }
        std::cout << '\n';
      } else {
        const auto kind = ns::parse_rate_kind(th_rate);
        std::cout << "rate,n,budget,lambda,value\n"
                  << ns::rate_kind_name(kind) << ',' << th_n << ',' << num(th_budget) << ',' << num(th_lambda) << ','
                  << num(ns::rate_curve(kind, th_n, th_budget, th_lambda)) << '\n';
      }
    } else if (*experiment) {
      const auto kind = ns::parse_experiment_kind(ex_kind);
      auto spec = ns::ExperimentSpec::defaults(kind, ex_full);
      if (!ex_config.empty()) ns::apply_config(spec, ns::load_config(ex_config));
      // Flags override the file.
      ns::ConfigMap flags;
      auto join = [](const auto& v) {
        std::ostringstream s;
        for (std::size_t k = 0; k < v.size(); ++k) s << (k ? "," : "") << std::setprecision(17) << v[k];
        return s.str();
      };
      if (!ex_n.empty()) flags["n"] = join(ex_n);
      if (!ex_alpha.empty()) {
        flags["alpha"] = join(ex_alpha);
        spec.budgets.clear();
      }
      if (!ex_budget.empty()) flags["budget"] = join(ex_budget);
      if (!ex_lambda.empty()) flags["lambda"] = join(ex_lambda);
      if (!ex_models.empty()) flags["models"] = join(ex_models);
      if (!ex_estimators.empty()) flags["estimators"] = join(ex_estimators);
      if (ex_replicates) flags["replicates"] = std::to_string(*ex_replicates);
      if (ex_seed) flags["seed"] = std::to_string(*ex_seed);
      if (!ex_stages.empty()) flags["stages"] = ex_stages;
      if (ex_c0) flags["c0"] = join(std::vector<double>{*ex_c0});
      if (ex_c1) flags["c1"] = join(std::vector<double>{*ex_c1});
      if (!ex_threshold.empty()) flags["threshold_constant"] = ex_threshold;
      if (ex_estimate_lambda) flags["estimate_lambda"] = "true";
      if (ex_workers) flags["workers"] = std::to_string(*ex_workers);
      if (!ex_out.empty()) flags["out"] = ex_out;
      if (!ex_regions.empty()) flags["regions_dir"] = ex_regions;
      if (ex_timing) flags["timing"] = "true";
      ns::apply_config(spec, flags);

      const auto output = ns::run_experiment(spec);
      std::ofstream file;
      const std::string out_path = spec.output_csv.string();
      ns::write_rows_csv(open_out(out_path, file), output.rows, spec.timing);
      const auto summary = ns::summarize(output.rows);
      if (!ex_summary.empty()) {
        std::ofstream s(ex_summary);
        if (!s) throw std::runtime_error("cannot write " + ex_summary);
        ns::write_summary_csv(s, summary);
      }
      if (!spec.regions_dir.empty()) {
        for (const auto& capture : output.regions) {
          const auto dir = output.regions.size() == 1 ? spec.regions_dir : spec.regions_dir / tag_dir_name(capture);
          for (const auto& p : ns::emit_regions(capture.states, dir)) std::cerr << "wrote " << p.string() << '\n';
        }
      }
      if (kind == ns::ExperimentKind::ScalingN || kind == ns::ExperimentKind::ScalingBudget) {
        // Log-log slope of mean d_KT against n (or 1/alpha) per model and estimator.
        std::map<std::pair<ns::SamplingModel, ns::EstimatorId>, std::pair<std::vector<double>, std::vector<double>>> fits;
        for (const auto& a : summary) {
          auto& [x, y] = fits[{a.model, a.estimator}];
          x.push_back(kind == ns::ExperimentKind::ScalingN ? static_cast<double>(a.n) : 1.0 / a.alpha);
          y.push_back(a.d_kt.mean);
        }
        for (const auto& [key, xy] : fits) {
          if (xy.first.size() < 2) continue;
          std::cerr << "slope " << (key.first == ns::SamplingModel::WithReplacement ? "with" : "without") << ' '
                    << ns::estimator_name(key.second) << ' ' << ns::fit_loglog_slope(xy.first, xy.second) << '\n';
        }
      }
    }
  } catch (const ns::CapExceeded& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return kCapRefusal;
  } catch (const CLI::Error& e) {
    std::cerr << "usage: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return 0;
}
