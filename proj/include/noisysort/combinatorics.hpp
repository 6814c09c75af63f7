#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "noisysort/permutation.hpp"

namespace noisysort {

/// Exact nonnegative integer for permutation counts.
class BigCount {
 public:
  BigCount() = default;
  explicit BigCount(boost::multiprecision::cpp_int v);
  BigCount(std::uint64_t v) : value_(v) {}  // NOLINT(google-explicit-constructor)

  const boost::multiprecision::cpp_int& value() const noexcept { return value_; }
  std::string to_string() const { return value_.str(); }
  /// Natural log, accurate for values far beyond double range.
  double log() const;

  friend bool operator==(const BigCount&, const BigCount&) = default;
  friend auto operator<=>(const BigCount& a, const BigCount& b) {
    return a.value_ < b.value_ ? std::strong_ordering::less
           : b.value_ < a.value_ ? std::strong_ordering::greater
                                 : std::strong_ordering::equal;
  }

 private:
  boost::multiprecision::cpp_int value_;
};

BigCount factorial(unsigned n);

/// |{pi in S_n : d_KT(pi, id) <= k}| via a prefix-sum DP over inversion
/// tables. Requires k <= n(n-1)/2.
BigCount count_at_most_k_inversions(std::size_t n, std::uint64_t k);

/// Mahonian numbers I(n, 0..kmax): permutations with exactly k inversions.
std::vector<BigCount> mahonian_row(std::size_t n, std::uint64_t kmax);

struct InversionBoundReport {
  std::size_t n = 0;
  std::uint64_t k = 0;
  double lower_bound = 0;  // n log(k/n) - n
  double log_count = 0;
  double upper_bound = 0;  // n log(1 + k/n) + n
  bool holds = false;
};

/// Compares n log(k/n) - n <= log count <= n log(1 + k/n) + n with the exact count.
/// Requires 1 <= k <= n(n-1)/2.
InversionBoundReport check_lemma_inversion_bounds(std::size_t n, std::uint64_t k);

/// Permutations within Kendall tau distance r of `center`, in lexicographic
/// order. Enumerates S_n, so center.size() must be within the cap.
std::vector<Permutation> ball_members(const Permutation& center, std::uint64_t r,
                                      std::size_t cap = kDefaultEnumerationCap);

/// A set of permutations, pairwise more than `epsilon` apart in d_KT.
struct PackingSet {
  std::size_t n = 0;
  std::uint64_t epsilon = 0;
  std::vector<Permutation> members;
};

/// Optional restriction of a packing scan to a Kendall tau ball.
struct BallUniverse {
  Permutation center;
  std::uint64_t radius;
};

/// Greedy maximal epsilon-packing of S_n (or of a ball in it) scanned in
/// lexicographic order. Maximality makes it an epsilon-net of the universe.
PackingSet greedy_maximal_packing(std::size_t n, std::uint64_t epsilon,
                                  const std::optional<BallUniverse>& universe = std::nullopt,
                                  std::size_t cap = kDefaultEnumerationCap);

/// A packing member built from a sparse binary code word.
struct SparsePackingMember {
  std::vector<std::uint8_t> code;  // length n/2
  Permutation permutation;
};

struct SparsePacking {
  std::size_t n = 0;
  std::uint64_t radius = 0;
  std::uint64_t min_separation = 0;  // ceil(r/2)
  std::vector<SparsePackingMember> members;

  PackingSet as_packing_set() const;
};

/// Largest n/2 accepted by sparse_vg_packing (2^(n/2) candidate words).
inline constexpr std::size_t kMaxSparseCodeLength = 24;

/// Greedy sparse Varshamov-Gilbert code over {0,1}^(n/2) with at most r ones
/// and pairwise Hamming distance >= r/2, mapped to permutations that swap
/// items 2i-1 and 2i where the code word has a one. Requires even n and
/// 1 <= r < n/2.
SparsePacking sparse_vg_packing(std::size_t n, std::uint64_t r);

/// Permutation image of one code word.
Permutation permutation_from_code(const std::vector<std::uint8_t>& code);

struct EntropyReport {
  std::size_t n = 0;
  std::uint64_t r = 0;
  std::uint64_t epsilon = 0;
  double prop_lower = 0;  // n log(r/(n+eps)) - 2n
  double prop_upper = 0;  // n log((2n+2r)/eps) + 2n
  std::optional<std::size_t> greedy_size;  // exact greedy packing of B(id, r); n <= 6
  std::optional<double> log_greedy_size;
  std::optional<bool> within_bounds;
};

inline constexpr std::size_t kExactEntropyMaxN = 6;

/// Metric-entropy bounds for B(pi, r) at scale epsilon, with an exact greedy
/// packing check for small n. Requires 0 < epsilon < r <= n(n-1)/2.
EntropyReport entropy_bounds(std::size_t n, std::uint64_t r, std::uint64_t epsilon);

}  // namespace noisysort
