#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "xspn/dataset.hpp"
#include "xspn/scope.hpp"

namespace xspn {

/// Distribution over n binary variables that is partially exchangeable with
/// respect to the count of ones: every assignment with t ones has probability
/// weights[t], so sum_t weights[t] * C(n, t) = 1.
class ExchangeableLeaf {
 public:
  /// Tolerance on sum_t weights[t] * C(n, t) accepted by the constructor.
  static constexpr double kNormalizationTolerance = 1e-9;

  /// Throws InputError unless weights has n+1 finite non-negative entries that
  /// normalize within tolerance.
  ExchangeableLeaf(Scope scope, std::vector<double> weights);

  /// Fit from the given rows restricted to `scope`.
  ///
  /// With c_t rows having t ones among N, the smoothed class probability is
  /// (c_t + alpha) / (N + alpha (n+1)); dividing by C(n, t) spreads it evenly
  /// over the class. alpha = 0 gives the maximum-likelihood estimate.
  static ExchangeableLeaf fit(const BinaryDataset& data, std::span<const std::size_t> rows,
                              const Scope& scope, double alpha);

  const Scope& scope() const noexcept { return scope_; }
  std::size_t size() const noexcept { return scope_.size(); }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<const double> log_weights() const noexcept { return log_weights_; }

  /// sum_t weights[t] * C(n, t)
  double total_mass() const;

  /// ln weights[T(x)]; `values` is indexed by global variable id and must
  /// observe every scope variable.
  double log_prob(std::span<const std::int8_t> values) const;
  /// ln sum_t C(n - n_e, t - t_e) weights[t]; 0 for empty evidence.
  double log_marginal(std::span<const std::int8_t> values) const;

 private:
  double log_marginal_counts(std::size_t observed, std::size_t observed_ones) const;

  Scope scope_;
  std::vector<double> weights_;
  std::vector<double> log_weights_;
};

}  // namespace xspn
