#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace qcl {

/// Arbitrary-precision integer used for counts and series coefficients.
using BigCount = boost::multiprecision::cpp_int;

/// Exact rational, used where densities and singularities must stay exact.
using Rational = boost::multiprecision::cpp_rational;

inline BigCount binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  BigCount result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    result *= n - k + i;
    result /= i;  // exact: result is C(n-k+i, i) after this line
  }
  return result;
}

/// Number of plane binary trees with n internal nodes, (2n choose n)/(n+1).
inline BigCount catalan(std::uint64_t n) { return binomial(2 * n, n) / (n + 1); }

inline std::optional<std::uint64_t> to_u64(const BigCount& value) {
  if (value < 0 || value > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
  return value.convert_to<std::uint64_t>();
}

inline std::uint64_t to_u64_or_throw(const BigCount& value, const char* what) {
  auto v = to_u64(value);
  if (!v) throw std::overflow_error(std::string(what) + " does not fit in 64 bits");
  return *v;
}

}  // namespace qcl
