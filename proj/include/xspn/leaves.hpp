#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "xspn/dataset.hpp"
#include "xspn/exchangeable_leaf.hpp"
#include "xspn/scope.hpp"

namespace xspn {

// Leaf distributions evaluate against a span of evidence values indexed by
// global variable id (0/1 observed, negative = unobserved). Unobserved
// variables are summed out.

class BernoulliLeaf {
 public:
  /// Throws InputError unless 0 <= p_one <= 1.
  BernoulliLeaf(VariableId variable, double p_one);

  /// p_one = (c_1 + alpha) / (N + 2 alpha)
  static BernoulliLeaf fit(const BinaryDataset& data, std::span<const std::size_t> rows, VariableId variable,
                           double alpha);

  VariableId variable() const noexcept { return variable_; }
  double p_one() const noexcept { return p_one_; }
  Scope scope() const { return Scope({variable_}); }

  double log_marginal(std::span<const std::int8_t> values) const noexcept;

 private:
  VariableId variable_;
  double p_one_;
  double log_one_;
  double log_zero_;
};

/// Independent Bernoulli per scope variable.
class FactorizedLeaf {
 public:
  explicit FactorizedLeaf(std::vector<BernoulliLeaf> factors);

  static FactorizedLeaf fit(const BinaryDataset& data, std::span<const std::size_t> rows, const Scope& scope,
                            double alpha);

  const Scope& scope() const noexcept { return scope_; }
  std::span<const BernoulliLeaf> factors() const noexcept { return factors_; }

  double log_marginal(std::span<const std::int8_t> values) const noexcept;

 private:
  Scope scope_;
  std::vector<BernoulliLeaf> factors_;
};

/// Tree-structured distribution. Local index i refers to scope()[i]; the root
/// has parent -1. `cpt[i][a][b]` = P(X_i = b | X_parent = a); for the root
/// both rows hold the marginal P(X_root = b).
class ChowLiuLeaf {
 public:
  using Table = std::array<std::array<double, 2>, 2>;

  static constexpr double kRowTolerance = 1e-9;

  /// Throws InputError unless `parent` describes a single tree and every CPT
  /// row is a distribution.
  ChowLiuLeaf(Scope scope, std::vector<int> parent, std::vector<Table> cpt);

  /// Mutual information from alpha-smoothed pair counts, maximum spanning tree
  /// by Kruskal over edges ordered by (-MI, i, j), rooted at the lowest id.
  static ChowLiuLeaf fit(const BinaryDataset& data, std::span<const std::size_t> rows, const Scope& scope,
                         double alpha);

  const Scope& scope() const noexcept { return scope_; }
  std::span<const int> parent() const noexcept { return parent_; }
  std::span<const Table> cpt() const noexcept { return cpt_; }
  std::size_t root() const noexcept { return order_.front(); }

  /// Single upward pass over the tree.
  double log_marginal(std::span<const std::int8_t> values) const;

 private:
  Scope scope_;
  std::vector<int> parent_;
  std::vector<Table> cpt_;
  std::vector<Table> log_cpt_;
  std::vector<std::size_t> order_;  // parents before children
};

using LeafDistribution = std::variant<BernoulliLeaf, FactorizedLeaf, ExchangeableLeaf, ChowLiuLeaf>;

Scope leaf_scope(const LeafDistribution& leaf);
double leaf_log_marginal(const LeafDistribution& leaf, std::span<const std::int8_t> values);
/// bernoulli, factorized, exchangeable_counting or chow_liu
std::string_view leaf_kind(const LeafDistribution& leaf) noexcept;
/// Bernoulli 1, factorized n, exchangeable n+1, Chow-Liu 2n (2 for the root
/// marginal, 2 per conditional table).
std::size_t leaf_parameter_count(const LeafDistribution& leaf) noexcept;

}  // namespace xspn
