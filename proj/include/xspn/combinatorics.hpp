#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include <boost/multiprecision/cpp_int.hpp>

namespace xspn {

using BigInt = boost::multiprecision::cpp_int;

/// Number of ones in a binary assignment.
std::size_t count_statistic(std::span<const std::uint8_t> x) noexcept;

/// Exact C(n, t); throws InputError when t > n.
BigInt class_size(std::size_t n, std::size_t t);

/// Number of completions of evidence with `n_e` observed variables (`t_e` of
/// them ones) that have exactly `t` ones overall: C(n - n_e, t - t_e), or 0
/// when t - t_e lies outside [0, n - n_e].
BigInt consistent_class_size(std::size_t n, std::size_t n_e, std::size_t t_e, std::size_t t);

/// Largest n for which `log_binomial` reads an exact 64-bit Pascal table.
inline constexpr std::size_t kExactBinomialLimit = 60;

/// ln C(n, k); -inf when k > n. Exact table up to n = 60, log-gamma beyond.
double log_binomial(std::size_t n, std::size_t k) noexcept;

/// C(n, k) as a double: exact 64-bit table converted once for n <= 60,
/// exp(log_binomial) beyond (overflows to +inf past ~1e308).
double binomial(std::size_t n, std::size_t k) noexcept;

/// ln of a non-negative big integer (-inf for zero); valid past the double range.
double log_of(const BigInt& value);

}  // namespace xspn
