#include <cmath>
#include <limits>

#include "xspn/error.hpp"
#include "xspn/stats.hpp"

namespace xspn {

namespace {

constexpr int kMaxIterations = 100000;
constexpr double kEpsilon = 1e-16;
constexpr double kTiny = 1e-300;

// P(a, x) by its power series; converges quickly for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int n = 0; n < kMaxIterations; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEpsilon) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a, x) by the Legendre continued fraction (modified Lentz); x >= a + 1.
double gamma_q_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEpsilon) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

void check_args(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) throw InputError("incomplete gamma needs a > 0 and x >= 0");
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  check_args(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
  check_args(a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_fraction(a, x);
}

double chi2_survival(double x, double dof) {
  if (!(dof > 0.0)) return 1.0;
  if (!(x > 0.0)) return 1.0;
  return regularized_gamma_q(0.5 * dof, 0.5 * x);
}

}  // namespace xspn
