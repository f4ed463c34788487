#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>

#include "xspn/dataset.hpp"
#include "xspn/network.hpp"
#include "xspn/stats.hpp"

namespace xspn {

/// Learner variants, differing in exchangeability testing and in the leaf
/// built when fewer than `min_instances` rows remain.
enum class Variant {
  spn,      // no test; factorized fallback
  spn_clt,  // no test; Chow-Liu fallback
  xspn_t,   // pairwise/full test; factorized fallback
  xspn_tf,  // pairwise/full test; exchangeable fallback
};

std::string_view to_string(Variant v) noexcept;
/// Accepts SPN, SPN_CLT, XSPN_T, XSPN_TF in any case, with '-' or '_'.
Variant parse_variant(std::string_view text);

enum class ExchangeabilityTest { pairwise, full };

std::string_view to_string(ExchangeabilityTest t) noexcept;
ExchangeabilityTest parse_exchangeability_test(std::string_view text);

struct Hyperparams {
  double rho = 5.0;                 // g-test threshold on the raw statistic
  std::size_t min_instances = 200;  // m
  double exch_significance = 0.05;  // p, per pair for the pairwise test
  double alpha = 0.1;               // Laplace smoothing
  Variant variant = Variant::xspn_tf;
  std::size_t max_children = 2;
  std::uint64_t seed = 0;
  std::size_t full_test_max_vars = kDefaultFullTestMaxVars;
  ExchangeabilityTest exch_test = ExchangeabilityTest::pairwise;
  PairCorrection pair_correction = PairCorrection::bonferroni;
  std::size_t exch_test_max_rows = 2000;  // deterministic subsample above this
  std::size_t max_depth = 200;

  /// Throws InputError on out-of-range values.
  void validate() const;
  bool tests_exchangeability() const noexcept {
    return variant == Variant::xspn_t || variant == Variant::xspn_tf;
  }
};

struct LearnStats {
  std::size_t exchangeability_tests = 0;
  std::size_t exchangeable_by_test = 0;
  std::size_t min_instance_leaves = 0;
  std::size_t univariate_leaves = 0;
  std::size_t product_splits = 0;
  std::size_t sum_splits = 0;
  std::size_t degenerate_fallbacks = 0;
  double exchangeability_seconds = 0.0;
};

/// Recursive structure learning over all columns of `data`. The result passes
/// `validate()` and depends only on (data, hp).
Network learn(const BinaryDataset& data, const Hyperparams& hp, LearnStats* stats = nullptr);
/// Same, restricted to the given rows.
Network learn(const BinaryDataset& data, std::span<const std::size_t> rows, const Hyperparams& hp,
              LearnStats* stats = nullptr);

/// Sum weights + leaf parameters (Bernoulli 1, factorized n, exchangeable
/// n+1, Chow-Liu 2n).
std::size_t count_parameters(const Network& network);

struct NetworkSummary {
  std::size_t nodes = 0;
  std::size_t sums = 0;
  std::size_t products = 0;
  std::size_t leaves = 0;
  std::size_t parameters = 0;
  std::size_t depth = 0;
  std::map<std::string, std::size_t, std::less<>> leaf_census;
};

NetworkSummary summarize(const Network& network);

}  // namespace xspn
