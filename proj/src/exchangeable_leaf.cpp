#include "xspn/exchangeable_leaf.hpp"

#include <cmath>
#include <string>

#include "xspn/combinatorics.hpp"
#include "xspn/error.hpp"
#include "xspn/logmath.hpp"

namespace xspn {

ExchangeableLeaf::ExchangeableLeaf(Scope scope, std::vector<double> weights)
    : scope_(std::move(scope)), weights_(std::move(weights)) {
  if (scope_.empty()) throw InputError("exchangeable leaf needs a non-empty scope");
  if (weights_.size() != scope_.size() + 1)
    throw InputError("exchangeable leaf over " + std::to_string(scope_.size()) + " variables needs " +
                     std::to_string(scope_.size() + 1) + " weights");
  log_weights_.reserve(weights_.size());
  for (double w : weights_) {
    if (!std::isfinite(w) || w < 0.0) throw InputError("exchangeable leaf weight is negative or not finite");
    log_weights_.push_back(safe_log(w));
  }
  const double mass = total_mass();
  if (std::abs(mass - 1.0) > kNormalizationTolerance)
    throw InputError("exchangeable leaf weights do not normalize (total mass " + std::to_string(mass) + ")");
}

ExchangeableLeaf ExchangeableLeaf::fit(const BinaryDataset& data, std::span<const std::size_t> rows,
                                       const Scope& scope, double alpha) {
  if (rows.empty()) throw InputError("exchangeable leaf fit needs at least one row");
  if (alpha < 0.0) throw InputError("smoothing must be non-negative");
  const std::size_t n = scope.size();
  std::vector<std::size_t> counts(n + 1, 0);
  for (std::size_t r : rows) {
    std::size_t t = 0;
    for (VariableId v : scope) t += data(r, v);
    ++counts[t];
  }
  const double denom = static_cast<double>(rows.size()) + alpha * static_cast<double>(n + 1);
  std::vector<double> weights(n + 1);
  for (std::size_t t = 0; t <= n; ++t) {
    const double class_prob = (static_cast<double>(counts[t]) + alpha) / denom;
    if (class_prob == 0.0)
      weights[t] = 0.0;
    else if (n <= kExactBinomialLimit)
      weights[t] = class_prob / binomial(n, t);
    else
      weights[t] = std::exp(std::log(class_prob) - log_binomial(n, t));
  }
  return ExchangeableLeaf(scope, std::move(weights));
}

double ExchangeableLeaf::total_mass() const {
  const std::size_t n = size();
  double mass = 0.0;
  for (std::size_t t = 0; t <= n; ++t)
    if (weights_[t] > 0.0)
      mass += n <= kExactBinomialLimit ? weights_[t] * binomial(n, t) : std::exp(log_weights_[t] + log_binomial(n, t));
  return mass;
}

double ExchangeableLeaf::log_prob(std::span<const std::int8_t> values) const {
  std::size_t t = 0;
  for (VariableId v : scope_) {
    if (v >= values.size() || values[v] < 0)
      throw InputError("assignment is missing variable " + std::to_string(v));
    t += static_cast<std::size_t>(values[v]);
  }
  return log_weights_[t];
}

double ExchangeableLeaf::log_marginal(std::span<const std::int8_t> values) const {
  std::size_t observed = 0;
  std::size_t ones = 0;
  for (VariableId v : scope_) {
    if (v < values.size() && values[v] >= 0) {
      ++observed;
      ones += static_cast<std::size_t>(values[v]);
    }
  }
  return log_marginal_counts(observed, ones);
}

double ExchangeableLeaf::log_marginal_counts(std::size_t observed, std::size_t observed_ones) const {
  const std::size_t n = size();
  if (observed == 0) return 0.0;
  if (observed == n) return log_weights_[observed_ones];
  const std::size_t free = n - observed;
  double acc = kNegInf;
  for (std::size_t k = 0; k <= free; ++k)
    acc = log_add(acc, log_binomial(free, k) + log_weights_[observed_ones + k]);
  return acc;
}

}  // namespace xspn
