#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace noisysort {

/// Operands of a binary operation do not share the same item count.
class DimensionMismatch : public std::invalid_argument {
 public:
  DimensionMismatch(std::size_t lhs, std::size_t rhs)
      : std::invalid_argument("incompatible sizes: " + std::to_string(lhs) + " vs " +
                              std::to_string(rhs)) {}
};

/// Input violates a documented precondition or range invariant.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A request exceeds a configured resource cap (enumeration size, n, budget).
class CapExceeded : public std::length_error {
 public:
  CapExceeded(const std::string& what, std::size_t requested, std::size_t cap)
      : std::length_error(what + " " + std::to_string(requested) + " exceeds cap " +
                          std::to_string(cap)),
        cap_(cap) {}

  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t cap_;
};

}  // namespace noisysort
