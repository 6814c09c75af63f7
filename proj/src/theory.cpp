#include "noisysort/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "noisysort/errors.hpp"
#include "noisysort/rng.hpp"

namespace noisysort {

namespace {

bool open_unit(double x) { return x > 0.0 && x < 1.0; }

double diameter(std::size_t n) { return static_cast<double>(n) * static_cast<double>(n - 1) / 2.0; }

}  // namespace

double bernoulli_kl(double p, double q) {
  if (!open_unit(p) || !open_unit(q)) {
    throw PreconditionError("Bernoulli KL needs p, q in (0, 1); boundary values diverge");
  }
  return p * std::log(p / q) + (1 - p) * std::log((1 - p) / (1 - q));
}

TailBounds binomial_tail_bounds(std::uint64_t n_trials, double p, double r, double s) {
  if (!(0 < r && r < p && p < s && s < 1)) throw PreconditionError("tail bounds need 0 < r < p < s < 1");
  const double dn = static_cast<double>(n_trials);
  return {std::exp(-dn * (p - r) * (p - r) / (2 * p * (1 - r))),
          std::exp(-dn * (p - s) * (p - s) / (2 * s * (1 - p)))};
}

EmpiricalTails empirical_binomial_tails(std::uint64_t n_trials, double p, double r, double s,
                                        std::uint64_t draws, std::uint64_t seed) {
  if (draws == 0) throw PreconditionError("need at least one draw");
  Rng rng(seed);
  std::binomial_distribution<std::uint64_t> bin(n_trials, p);
  const double lo = r * static_cast<double>(n_trials);
  const double hi = s * static_cast<double>(n_trials);
  std::uint64_t below = 0, above = 0;
  for (std::uint64_t k = 0; k < draws; ++k) {
    const double x = static_cast<double>(bin(rng));
    below += x <= lo;
    above += x >= hi;
  }
  return {static_cast<double>(below) / static_cast<double>(draws),
          static_cast<double>(above) / static_cast<double>(draws), draws};
}

double model_kl(const Permutation& pi, const Permutation& sigma, const SamplingTag& tag, double lambda) {
  if (!(lambda > 0 && lambda < 0.5)) throw PreconditionError("lambda must lie in (0, 1/2)");
  const auto d = static_cast<double>(kendall_tau(pi, sigma));
  double p = tag.budget;
  if (tag.model == SamplingModel::WithReplacement) {
    if (pi.size() < 2) return 0.0;
    p = tag.budget / diameter(pi.size());
  } else if (!(p > 0 && p <= 1)) {
    throw PreconditionError("p must lie in (0, 1]");
  }
  return 2 * d * p * lambda * std::log((1 + 2 * lambda) / (1 - 2 * lambda));
}

RateKind parse_rate_kind(std::string_view name) {
  if (name == "minimax_O1") return RateKind::MinimaxO1;
  if (name == "minimax_O2") return RateKind::MinimaxO2;
  if (name == "ms_upper") return RateKind::MsUpper;
  if (name == "lower_O1") return RateKind::LowerO1;
  if (name == "lower_O2") return RateKind::LowerO2;
  throw PreconditionError("unknown rate curve '" + std::string(name) + "'");
}

std::string_view rate_kind_name(RateKind kind) {
  switch (kind) {
    case RateKind::MinimaxO1: return "minimax_O1";
    case RateKind::MinimaxO2: return "minimax_O2";
    case RateKind::MsUpper: return "ms_upper";
    case RateKind::LowerO1: return "lower_O1";
    case RateKind::LowerO2: return "lower_O2";
  }
  return "?";
}

double rate_curve(RateKind kind, std::size_t n, double budget, double lambda) {
  if (n < 1) throw PreconditionError("rate curve needs n >= 1");
  if (!(lambda > 0 && lambda < 0.5)) throw PreconditionError("lambda must lie in (0, 1/2)");
  if (budget < 0) throw PreconditionError("budget must be nonnegative");
  const double cap = diameter(n);
  const double dn = static_cast<double>(n);
  const double inf = std::numeric_limits<double>::infinity();
  auto per = [&](double numerator) { return budget > 0 ? numerator / budget : inf; };
  const double l2 = lambda * lambda;
  const double flip = std::log(1.0 / (1.0 - 2.0 * lambda));
  double v = 0;
  switch (kind) {
    case RateKind::MinimaxO1: v = per(dn) / l2; break;
    case RateKind::MinimaxO2: v = per(dn * dn * dn) / l2; break;
    case RateKind::MsUpper: {
      const double logn = std::log(dn);
      const double loglogn = logn > 1.0 ? std::log(logn) : 0.0;
      v = budget > 0 ? dn * dn * dn / budget * logn * loglogn : inf;
      break;
    }
    case RateKind::LowerO1: v = std::min(per(dn) / l2, per(dn) / flip); break;
    case RateKind::LowerO2: v = std::min(per(dn * dn * dn) / l2, per(dn * dn * dn) / flip); break;
  }
  return std::clamp(v, 0.0, cap);
}

}  // namespace noisysort
