#include "noisysort/permutation.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <numeric>

#include "noisysort/errors.hpp"

namespace noisysort {

namespace {

void require_same_size(const Permutation& a, const Permutation& b) {
  if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
}

// Fenwick tree over positions 1..n holding 0/1 occupancy.
class Fenwick {
 public:
  explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {}

  void add(std::size_t pos, int delta) {
    for (; pos < tree_.size(); pos += pos & (~pos + 1)) tree_[pos] += delta;
  }

  int prefix(std::size_t pos) const {
    int s = 0;
    for (; pos > 0; pos -= pos & (~pos + 1)) s += tree_[pos];
    return s;
  }

  // Smallest pos with prefix(pos) >= k (k >= 1).
  std::size_t select(int k) const {
    std::size_t pos = 0;
    std::size_t step = std::bit_floor(tree_.size() - 1);
    for (; step > 0; step >>= 1) {
      if (pos + step < tree_.size() && tree_[pos + step] < k) {
        pos += step;
        k -= tree_[pos];
      }
    }
    return pos + 1;
  }

 private:
  std::vector<int> tree_;
};

std::uint64_t merge_count(std::vector<std::uint32_t>& a, std::vector<std::uint32_t>& buf,
                          std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t inv = merge_count(a, buf, lo, mid) + merge_count(a, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (a[j] < a[i]) {
      inv += mid - i;
      buf[k++] = a[j++];
    } else {
      buf[k++] = a[i++];
    }
  }
  while (i < mid) buf[k++] = a[i++];
  while (j < hi) buf[k++] = a[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
            a.begin() + static_cast<std::ptrdiff_t>(lo));
  return inv;
}

}  // namespace

Permutation::Permutation(std::vector<std::uint32_t> one_based) : map_(std::move(one_based)) {
  if (map_.empty()) throw PreconditionError("permutation must have n >= 1");
  std::vector<bool> seen(map_.size() + 1, false);
  for (std::uint32_t v : map_) {
    if (v < 1 || v > map_.size() || seen[v]) {
      throw PreconditionError("not a bijection on {1..." + std::to_string(map_.size()) + "}");
    }
    seen[v] = true;
  }
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<std::uint32_t> v(n);
  std::iota(v.begin(), v.end(), 1u);
  return Permutation(std::move(v));
}

Permutation Permutation::reversal(std::size_t n) {
  std::vector<std::uint32_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<std::uint32_t>(n - i);
  return Permutation(std::move(v));
}

std::string Permutation::to_string() const {
  std::string out;
  out.reserve(map_.size() * 6);
  for (std::size_t i = 0; i < map_.size(); ++i) {
    if (i) out.push_back(' ');
    out += std::to_string(map_[i]);
  }
  return out;
}

Permutation Permutation::parse(std::string_view line) {
  std::vector<std::uint32_t> v;
  const char* p = line.data();
  const char* end = p + line.size();
  while (p < end) {
    while (p < end && (*p == ' ' || *p == '\t' || *p == '\r' || *p == '\n' || *p == ',')) ++p;
    if (p == end) break;
    std::uint32_t x = 0;
    auto [next, ec] = std::from_chars(p, end, x);
    if (ec != std::errc{}) throw PreconditionError("malformed permutation line");
    v.push_back(x);
    p = next;
  }
  return Permutation(std::move(v));
}

Permutation from_ranks_unchecked(std::vector<std::uint32_t> one_based) {
  return Permutation(std::move(one_based), Permutation::Unchecked{});
}

InversionTable::InversionTable(std::vector<std::uint32_t> entries) : b_(std::move(entries)) {
  if (b_.empty()) throw PreconditionError("inversion table must have n >= 1");
  const std::size_t n = b_.size();
  for (std::size_t i = 0; i < n; ++i) {
    // slot i holds b_{i+1} whose range is {0, ..., n-(i+1)}
    if (b_[i] > n - 1 - i) {
      throw PreconditionError("inversion table entry b_" + std::to_string(i + 1) + " = " +
                              std::to_string(b_[i]) + " exceeds n - i = " +
                              std::to_string(n - 1 - i));
    }
  }
}

std::uint64_t InversionTable::total() const noexcept {
  return std::accumulate(b_.begin(), b_.end(), std::uint64_t{0});
}

std::uint64_t count_inversions(std::span<const std::uint32_t> sequence) {
  std::vector<std::uint32_t> a(sequence.begin(), sequence.end());
  std::vector<std::uint32_t> buf(a.size());
  return merge_count(a, buf, 0, a.size());
}

std::uint64_t kendall_tau(const Permutation& pi, const Permutation& sigma) {
  require_same_size(pi, sigma);
  // Read pi's values in the order sigma ranks the items; each inversion of
  // that sequence is a pair ordered one way by sigma and the other by pi.
  std::vector<std::uint32_t> seq(pi.size());
  for (std::size_t i = 0; i < pi.size(); ++i) seq[sigma.values()[i] - 1] = pi.values()[i];
  std::vector<std::uint32_t> buf(seq.size());
  return merge_count(seq, buf, 0, seq.size());
}

std::uint64_t l1_distance(const Permutation& pi, const Permutation& sigma) {
  require_same_size(pi, sigma);
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    const auto a = pi.values()[i], b = sigma.values()[i];
    s += a > b ? a - b : b - a;
  }
  return s;
}

std::uint64_t linf_distance(const Permutation& pi, const Permutation& sigma) {
  require_same_size(pi, sigma);
  std::uint64_t m = 0;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    const auto a = pi.values()[i], b = sigma.values()[i];
    m = std::max<std::uint64_t>(m, a > b ? a - b : b - a);
  }
  return m;
}

InversionTable to_inversion_table(const Permutation& pi) {
  const std::size_t n = pi.size();
  std::vector<std::uint32_t> b(n);
  Fenwick seen(n);
  for (std::size_t i = n; i-- > 0;) {
    const auto v = pi.values()[i];
    b[i] = static_cast<std::uint32_t>(seen.prefix(v - 1));
    seen.add(v, 1);
  }
  return InversionTable(std::move(b));
}

Permutation from_inversion_table(const InversionTable& table) {
  // pi(i) is the (b_i + 1)-th smallest value not used by positions 1..i-1.
  const std::size_t n = table.size();
  Fenwick available(n);
  for (std::size_t v = 1; v <= n; ++v) available.add(v, 1);
  std::vector<std::uint32_t> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t v = available.select(static_cast<int>(table[i]) + 1);
    out[i] = static_cast<std::uint32_t>(v);
    available.add(v, -1);
  }
  return from_ranks_unchecked(std::move(out));
}

Permutation compose(const Permutation& pi, const Permutation& sigma) {
  require_same_size(pi, sigma);
  std::vector<std::uint32_t> out(pi.size());
  for (std::size_t i = 0; i < pi.size(); ++i) out[i] = pi.map_[sigma.map_[i] - 1];
  return Permutation(std::move(out), Permutation::Unchecked{});
}

Permutation invert(const Permutation& pi) {
  std::vector<std::uint32_t> out(pi.size());
  for (std::size_t i = 0; i < pi.size(); ++i) out[pi.map_[i] - 1] = static_cast<std::uint32_t>(i + 1);
  return Permutation(std::move(out), Permutation::Unchecked{});
}

Permutation adjacent_transposition(std::size_t n, std::size_t k) {
  if (k < 1 || k >= n) {
    throw PreconditionError("adjacent transposition index k = " + std::to_string(k) +
                            " outside [1, " + std::to_string(n) + ")");
  }
  std::vector<std::uint32_t> v(n);
  std::iota(v.begin(), v.end(), 1u);
  std::swap(v[k - 1], v[k]);
  return from_ranks_unchecked(std::move(v));
}

PermutationRange::PermutationRange(std::size_t n, std::size_t cap) : n_(n) {
  if (n < 1) throw PreconditionError("enumeration requires n >= 1");
  if (n > cap) throw CapExceeded("enumeration of permutations with n =", n, cap);
}

PermutationRange::iterator::iterator(std::size_t n) : values_(n) {
  std::iota(values_.begin(), values_.end(), 1u);
  current_ = from_ranks_unchecked(values_);
}

PermutationRange::iterator& PermutationRange::iterator::operator++() {
  if (std::next_permutation(values_.begin(), values_.end())) {
    current_ = from_ranks_unchecked(values_);
  } else {
    current_.reset();
  }
  return *this;
}

std::vector<Permutation> enumerate_permutations(std::size_t n, std::size_t cap) {
  std::vector<Permutation> out;
  for (const Permutation& p : PermutationRange(n, cap)) out.push_back(p);
  return out;
}

}  // namespace noisysort
