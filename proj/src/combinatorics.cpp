#include "xspn/combinatorics.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "xspn/error.hpp"

namespace xspn {

std::size_t count_statistic(std::span<const std::uint8_t> x) noexcept {
  std::size_t t = 0;
  for (std::uint8_t v : x) t += v;
  return t;
}

BigInt class_size(std::size_t n, std::size_t t) {
  if (t > n) throw InputError("class_size: t=" + std::to_string(t) + " exceeds n=" + std::to_string(n));
  // Multiplicative form keeps every intermediate an exact binomial.
  const std::size_t k = std::min(t, n - t);
  BigInt c = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    c *= n - k + i;
    c /= i;
  }
  return c;
}

BigInt consistent_class_size(std::size_t n, std::size_t n_e, std::size_t t_e, std::size_t t) {
  if (n_e > n || t_e > n_e) throw InputError("consistent_class_size: evidence counts out of range");
  if (t < t_e || t - t_e > n - n_e) return 0;
  return class_size(n - n_e, t - t_e);
}

namespace {

struct PascalTable {
  std::array<std::array<double, kExactBinomialLimit + 1>, kExactBinomialLimit + 1> value{};
  std::array<std::array<double, kExactBinomialLimit + 1>, kExactBinomialLimit + 1> log_value{};
  PascalTable() {
    std::array<std::array<std::uint64_t, kExactBinomialLimit + 1>, kExactBinomialLimit + 1> c{};
    for (std::size_t n = 0; n <= kExactBinomialLimit; ++n) {
      c[n][0] = c[n][n] = 1;
      for (std::size_t k = 1; k < n; ++k) c[n][k] = c[n - 1][k - 1] + c[n - 1][k];
      for (std::size_t k = 0; k <= n; ++k) {
        value[n][k] = static_cast<double>(c[n][k]);
        log_value[n][k] = std::log(value[n][k]);
      }
    }
  }
};

constexpr std::size_t kLogFactorialTable = 4096;

struct LogFactorials {
  std::vector<double> value;
  LogFactorials() : value(kLogFactorialTable + 1) {
    for (std::size_t i = 0; i <= kLogFactorialTable; ++i) value[i] = std::lgamma(static_cast<double>(i) + 1.0);
  }
};

const PascalTable& pascal() {
  static const PascalTable table;
  return table;
}

double log_factorial(std::size_t n) {
  static const LogFactorials table;
  if (n <= kLogFactorialTable) return table.value[n];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

}  // namespace

double log_binomial(std::size_t n, std::size_t k) noexcept {
  if (k > n) return -std::numeric_limits<double>::infinity();
  if (n <= kExactBinomialLimit) return pascal().log_value[n][k];
  if (k == 0 || k == n) return 0.0;
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double binomial(std::size_t n, std::size_t k) noexcept {
  if (k > n) return 0.0;
  if (n <= kExactBinomialLimit) return pascal().value[n][k];
  return std::exp(log_binomial(n, k));
}

double log_of(const BigInt& value) {
  if (value < 0) throw InputError("log_of: negative value");
  if (value == 0) return -std::numeric_limits<double>::infinity();
  // 50-digit binary float: exponent range far past double, enough mantissa for a double result.
  const boost::multiprecision::cpp_bin_float_50 wide(value);
  return static_cast<double>(boost::multiprecision::log(wide));
}

}  // namespace xspn
