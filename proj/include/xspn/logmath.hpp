#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace xspn {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// ln(exp(a) + exp(b)); exact when either side is -inf.
inline double log_add(double a, double b) noexcept {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

/// ln sum exp(v); -inf for an empty input or all -inf entries.
inline double log_sum_exp(std::span<const double> v) noexcept {
  double hi = kNegInf;
  for (double x : v) hi = std::max(hi, x);
  if (hi == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - hi);
  return hi + std::log(s);
}

/// ln(p) with ln(0) = -inf.
inline double safe_log(double p) noexcept { return p > 0.0 ? std::log(p) : kNegInf; }

}  // namespace xspn
