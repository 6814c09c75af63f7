#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "noisysort/model.hpp"
#include "noisysort/permutation.hpp"

namespace noisysort {

/// KL(Ber(p) || Ber(q)); requires p, q in (0, 1).
double bernoulli_kl(double p, double q);

struct TailBounds {
  double lower_tail = 0;  // bound on P(X <= rN)
  double upper_tail = 0;  // bound on P(X >= sN)
};

/// Closed-form tail bounds for X ~ Bin(N, p):
///   P(X <= rN) <= exp(-N (p-r)^2 / (2p(1-r))),
///   P(X >= sN) <= exp(-N (p-s)^2 / (2s(1-p))).
/// Requires 0 < r < p < s < 1.
TailBounds binomial_tail_bounds(std::uint64_t n_trials, double p, double r, double s);

struct EmpiricalTails {
  double lower_tail = 0;  // fraction of draws with X <= rN
  double upper_tail = 0;  // fraction of draws with X >= sN
  std::uint64_t draws = 0;
};

/// Monte-Carlo estimate of the same two tail probabilities.
EmpiricalTails empirical_binomial_tails(std::uint64_t n_trials, double p, double r, double s,
                                        std::uint64_t draws, std::uint64_t seed);

/// KL divergence between the observation laws under pi and sigma for the
/// canonical matrix M*_n(lambda):
///   2 d_KT(pi, sigma) p lambda log((1+2 lambda)/(1-2 lambda))
/// with p = N / C(n,2) under sampling with replacement.
double model_kl(const Permutation& pi, const Permutation& sigma, const SamplingTag& tag, double lambda);

enum class RateKind {
  MinimaxO1,  // n / (p lambda^2) ^ n(n-1)/2
  MinimaxO2,  // n^3 / (N lambda^2) ^ n(n-1)/2
  MsUpper,    // (n^3 / N) log n log log n ^ n(n-1)/2
  LowerO1,    // n/(p lambda^2) ^ n/(p log(1/(1-2 lambda))) ^ n(n-1)/2
  LowerO2,    // n^3/(N lambda^2) ^ n^3/(N log(1/(1-2 lambda))) ^ n(n-1)/2
};

RateKind parse_rate_kind(std::string_view name);
std::string_view rate_kind_name(RateKind kind);

/// Reference rate curve for overlays; nonnegative and capped at the Kendall
/// tau diameter n(n-1)/2. `budget` is p for the O1 kinds and N otherwise.
double rate_curve(RateKind kind, std::size_t n, double budget, double lambda);

}  // namespace noisysort
