#pragma once

#include <cstddef>
#include <cstdint>
#include <iterator>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace noisysort {

/// Default largest n for which full enumeration of the symmetric group is
/// allowed (10! = 3,628,800 permutations).
inline constexpr std::size_t kDefaultEnumerationCap = 10;

/// A bijection on {1, ..., n}. `pi(i)` is the rank of item i, with rank 1 the
/// weakest and rank n the strongest. Immutable once constructed.
class Permutation {
 public:
  /// Takes the 1-indexed values pi(1), ..., pi(n); throws PreconditionError
  /// unless they form a bijection on {1, ..., n}.
  explicit Permutation(std::vector<std::uint32_t> one_based);

  static Permutation identity(std::size_t n);
  static Permutation reversal(std::size_t n);

  std::size_t size() const noexcept { return map_.size(); }

  /// pi(item) for a 1-indexed item.
  std::uint32_t operator()(std::size_t item) const { return map_[item - 1]; }

  /// values()[k] == pi(k + 1).
  std::span<const std::uint32_t> values() const noexcept { return map_; }

  /// Space-separated 1-indexed values on one line (no trailing newline).
  std::string to_string() const;
  static Permutation parse(std::string_view line);

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation&, const Permutation&) = default;

 private:
  struct Unchecked {};
  Permutation(std::vector<std::uint32_t> one_based, Unchecked) : map_(std::move(one_based)) {}
  friend Permutation compose(const Permutation&, const Permutation&);
  friend Permutation invert(const Permutation&);
  friend Permutation from_ranks_unchecked(std::vector<std::uint32_t>);

  std::vector<std::uint32_t> map_;
};

/// Builds a permutation from values already known to be a bijection.
/// Internal fast path for estimators; no validation.
Permutation from_ranks_unchecked(std::vector<std::uint32_t> one_based);

/// Inversion table b_1..b_n with b_i = #{j > i : pi(i) > pi(j)}.
class InversionTable {
 public:
  /// Throws PreconditionError if some b_i > n - i.
  explicit InversionTable(std::vector<std::uint32_t> entries);

  std::size_t size() const noexcept { return b_.size(); }
  std::uint32_t operator[](std::size_t i) const { return b_[i]; }  // 0-based slot
  std::span<const std::uint32_t> entries() const noexcept { return b_; }
  std::uint64_t total() const noexcept;

  friend bool operator==(const InversionTable&, const InversionTable&) = default;

 private:
  std::vector<std::uint32_t> b_;
};

/// Number of discordant pairs, O(n log n) by merge-sort inversion counting.
std::uint64_t kendall_tau(const Permutation& pi, const Permutation& sigma);
/// Spearman's footrule.
std::uint64_t l1_distance(const Permutation& pi, const Permutation& sigma);
std::uint64_t linf_distance(const Permutation& pi, const Permutation& sigma);

/// Inversions of an arbitrary integer sequence (pairs k < l with a[k] > a[l]).
std::uint64_t count_inversions(std::span<const std::uint32_t> sequence);

InversionTable to_inversion_table(const Permutation& pi);
Permutation from_inversion_table(const InversionTable& table);

/// (pi o sigma)(i) = pi(sigma(i)).
Permutation compose(const Permutation& pi, const Permutation& sigma);
Permutation invert(const Permutation& pi);
/// Swaps the images of k and k+1; requires 1 <= k < n.
Permutation adjacent_transposition(std::size_t n, std::size_t k);

/// All n! permutations in lexicographic order of their value sequence.
///
///   for (const Permutation& p : PermutationRange(4)) { ... }
///
/// Construction throws CapExceeded when n > cap.
class PermutationRange {
 public:
  explicit PermutationRange(std::size_t n, std::size_t cap = kDefaultEnumerationCap);

  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = Permutation;
    using difference_type = std::ptrdiff_t;
    using pointer = const Permutation*;
    using reference = const Permutation&;

    iterator() = default;
    reference operator*() const { return *current_; }
    pointer operator->() const { return &*current_; }
    iterator& operator++();
    void operator++(int) { ++*this; }
    friend bool operator==(const iterator& a, const iterator& b) {
      return a.current_.has_value() == b.current_.has_value();
    }

   private:
    friend class PermutationRange;
    explicit iterator(std::size_t n);
    std::vector<std::uint32_t> values_;
    std::optional<Permutation> current_;
  };

  iterator begin() const { return iterator(n_); }
  iterator end() const { return {}; }

 private:
  std::size_t n_;
};

/// Materialized enumeration; same cap semantics as PermutationRange.
std::vector<Permutation> enumerate_permutations(std::size_t n,
                                                std::size_t cap = kDefaultEnumerationCap);

}  // namespace noisysort
