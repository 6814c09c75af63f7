#include "noisysort/combinatorics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include "noisysort/errors.hpp"

namespace noisysort {

namespace mp = boost::multiprecision;

namespace {

std::uint64_t max_inversions(std::size_t n) {
  return static_cast<std::uint64_t>(n) * (n - 1) / 2;
}

// dp[s] = number of inversion tables of the first rows summing to exactly s,
// truncated at kmax. Row m (1-based from the end) admits b in {0..m-1}.
std::vector<mp::cpp_int> exact_inversion_counts(std::size_t n, std::uint64_t kmax) {
  std::vector<mp::cpp_int> dp(kmax + 1, 0);
  dp[0] = 1;
  std::vector<mp::cpp_int> prefix(kmax + 2);
  for (std::size_t width = 1; width <= n; ++width) {
    prefix[0] = 0;
    for (std::uint64_t s = 0; s <= kmax; ++s) prefix[s + 1] = prefix[s] + dp[s];
    // new[s] = sum_{b=0}^{width-1} dp[s-b]
    for (std::uint64_t s = 0; s <= kmax; ++s) {
      const std::uint64_t lo = s + 1 >= width ? s + 1 - width : 0;
      dp[s] = prefix[s + 1] - prefix[lo];
    }
  }
  return dp;
}

}  // namespace

BigCount::BigCount(mp::cpp_int v) : value_(std::move(v)) {
  if (value_ < 0) throw PreconditionError("BigCount must be nonnegative");
}

double BigCount::log() const {
  if (value_ == 0) return -std::numeric_limits<double>::infinity();
  const auto bits = mp::msb(value_);
  if (bits < 1000) return std::log(value_.convert_to<double>());
  const auto shift = bits - 64;
  const mp::cpp_int top = value_ >> shift;
  return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::numbers::ln2;
}

BigCount factorial(unsigned n) {
  mp::cpp_int f = 1;
  for (unsigned i = 2; i <= n; ++i) f *= i;
  return BigCount(std::move(f));
}

BigCount count_at_most_k_inversions(std::size_t n, std::uint64_t k) {
  if (n < 1) throw PreconditionError("count requires n >= 1");
  if (k > max_inversions(n)) {
    throw PreconditionError("k = " + std::to_string(k) + " exceeds n(n-1)/2 = " +
                            std::to_string(max_inversions(n)));
  }
  const auto dp = exact_inversion_counts(n, k);
  mp::cpp_int total = 0;
  for (const auto& c : dp) total += c;
  return BigCount(std::move(total));
}

std::vector<BigCount> mahonian_row(std::size_t n, std::uint64_t kmax) {
  if (n < 1) throw PreconditionError("mahonian_row requires n >= 1");
  kmax = std::min(kmax, max_inversions(n));
  auto dp = exact_inversion_counts(n, kmax);
  std::vector<BigCount> out;
  out.reserve(dp.size());
  for (auto& c : dp) out.emplace_back(std::move(c));
  return out;
}

InversionBoundReport check_lemma_inversion_bounds(std::size_t n, std::uint64_t k) {
  if (k < 1 || k > max_inversions(n)) {
    throw PreconditionError("inversion bounds need 1 <= k <= n(n-1)/2");
  }
  InversionBoundReport rep;
  rep.n = n;
  rep.k = k;
  const double dn = static_cast<double>(n);
  const double dk = static_cast<double>(k);
  rep.lower_bound = dn * std::log(dk / dn) - dn;
  rep.upper_bound = dn * std::log1p(dk / dn) + dn;
  rep.log_count = count_at_most_k_inversions(n, k).log();
  rep.holds = rep.lower_bound <= rep.log_count && rep.log_count <= rep.upper_bound;
  return rep;
}

std::vector<Permutation> ball_members(const Permutation& center, std::uint64_t r, std::size_t cap) {
  std::vector<Permutation> out;
  for (const Permutation& p : PermutationRange(center.size(), cap)) {
    if (kendall_tau(p, center) <= r) out.push_back(p);
  }
  return out;
}

PackingSet greedy_maximal_packing(std::size_t n, std::uint64_t epsilon,
                                  const std::optional<BallUniverse>& universe, std::size_t cap) {
  PackingSet out;
  out.n = n;
  out.epsilon = epsilon;
  auto consider = [&](const Permutation& p) {
    for (const Permutation& m : out.members) {
      if (kendall_tau(p, m) <= epsilon) return;
    }
    out.members.push_back(p);
  };
  if (universe) {
    if (universe->center.size() != n) throw DimensionMismatch(universe->center.size(), n);
    for (const Permutation& p : ball_members(universe->center, universe->radius, cap)) consider(p);
  } else {
    for (const Permutation& p : PermutationRange(n, cap)) consider(p);
  }
  return out;
}

Permutation permutation_from_code(const std::vector<std::uint8_t>& code) {
  std::vector<std::uint32_t> v(2 * code.size());
  for (std::size_t i = 0; i < code.size(); ++i) {
    const auto lo = static_cast<std::uint32_t>(2 * i + 1);
    v[2 * i] = code[i] ? lo + 1 : lo;
    v[2 * i + 1] = code[i] ? lo : lo + 1;
  }
  return from_ranks_unchecked(std::move(v));
}

PackingSet SparsePacking::as_packing_set() const {
  PackingSet out;
  out.n = n;
  out.epsilon = min_separation == 0 ? 0 : min_separation - 1;
  for (const auto& m : members) out.members.push_back(m.permutation);
  return out;
}

SparsePacking sparse_vg_packing(std::size_t n, std::uint64_t r) {
  if (n == 0 || n % 2 != 0) {
    throw PreconditionError("sparse packing requires even n, got " + std::to_string(n));
  }
  const std::size_t len = n / 2;
  if (r < 1 || 2 * r >= n) {
    throw PreconditionError("sparse packing requires 1 <= r < n/2");
  }
  if (len > kMaxSparseCodeLength) throw CapExceeded("sparse code length", len, kMaxSparseCodeLength);

  SparsePacking out;
  out.n = n;
  out.radius = r;
  out.min_separation = (r + 1) / 2;

  // Words are scanned in lexicographic order of (v(1), ..., v(n/2)), i.e.
  // increasing integer value with v(1) as the most significant bit.
  std::vector<std::uint64_t> kept;
  const std::uint64_t limit = std::uint64_t{1} << len;
  for (std::uint64_t word = 0; word < limit; ++word) {
    if (static_cast<std::uint64_t>(std::popcount(word)) > r) continue;
    bool far = true;
    for (std::uint64_t other : kept) {
      // Hamming >= r/2  <=>  2 * Hamming >= r
      if (2 * static_cast<std::uint64_t>(std::popcount(word ^ other)) < r) {
        far = false;
        break;
      }
    }
    if (far) kept.push_back(word);
  }

  out.members.reserve(kept.size());
  for (std::uint64_t word : kept) {
    std::vector<std::uint8_t> code(len);
    for (std::size_t i = 0; i < len; ++i) code[i] = (word >> (len - 1 - i)) & 1u;
    Permutation p = permutation_from_code(code);
    out.members.push_back({std::move(code), std::move(p)});
  }
  return out;
}

EntropyReport entropy_bounds(std::size_t n, std::uint64_t r, std::uint64_t epsilon) {
  if (epsilon == 0 || epsilon >= r || r > max_inversions(n)) {
    throw PreconditionError("entropy bounds need 0 < epsilon < r <= n(n-1)/2");
  }
  EntropyReport rep;
  rep.n = n;
  rep.r = r;
  rep.epsilon = epsilon;
  const double dn = static_cast<double>(n), dr = static_cast<double>(r),
               de = static_cast<double>(epsilon);
  rep.prop_lower = dn * std::log(dr / (dn + de)) - 2 * dn;
  rep.prop_upper = dn * std::log((2 * dn + 2 * dr) / de) + 2 * dn;
  if (n <= kExactEntropyMaxN) {
    const auto packing =
        greedy_maximal_packing(n, epsilon, BallUniverse{Permutation::identity(n), r});
    rep.greedy_size = packing.members.size();
    rep.log_greedy_size = std::log(static_cast<double>(packing.members.size()));
    rep.within_bounds = rep.prop_lower <= *rep.log_greedy_size && *rep.log_greedy_size <= rep.prop_upper;
  }
  return rep;
}

}  // namespace noisysort
