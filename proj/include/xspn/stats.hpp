#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "xspn/dataset.hpp"
#include "xspn/scope.hpp"

namespace xspn {

/// Kernels with an OpenMP path also keep a plain serial path; both give
/// bit-identical results.
enum class Execution { serial, parallel };

// ------------------------------------------------------------ special functions

/// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double regularized_gamma_q(double a, double x);
/// Upper tail P(X >= x) of a chi-square variable with `dof` degrees of freedom.
double chi2_survival(double x, double dof);

// ----------------------------------------------------------------- pair counts

/// Joint counts of two binary columns over a row subset.
struct PairCounts {
  std::size_t total = 0;
  std::size_t ones_a = 0;
  std::size_t ones_b = 0;
  std::size_t both = 0;

  /// cell[a][b] = #(X_first = a, X_second = b)
  std::array<std::array<double, 2>, 2> table() const noexcept;
  friend bool operator==(const PairCounts&, const PairCounts&) = default;
};

/// Position of pair (i, j), i < j, among the n(n-1)/2 pairs of n variables
/// enumerated row by row: (0,1), (0,2), ..., (1,2), ...
constexpr std::size_t pair_index(std::size_t i, std::size_t j, std::size_t n) noexcept {
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

/// Counts for every pair of `vars` (local positions), indexed by pair_index.
/// The parallel path packs columns into bit words and counts with popcount
/// over OpenMP-distributed pairs; the serial path walks the rows.
std::vector<PairCounts> pairwise_counts(const BinaryDataset& data, std::span<const std::size_t> rows,
                                        std::span<const VariableId> vars, Execution exec = Execution::parallel);

// ---------------------------------------------------------------------- g-test

/// G = 2 sum O ln(O / E) on the alpha-smoothed 2x2 table, E from its margins.
double g_statistic(const PairCounts& counts, double alpha) noexcept;
double g_statistic(const BinaryDataset& data, std::span<const std::size_t> rows, VariableId i, VariableId j,
                   double alpha);

/// Connected components of the graph with an edge wherever G > rho. Groups
/// are ascending and ordered by their smallest variable.
std::vector<std::vector<VariableId>> split_variables(const BinaryDataset& data, std::span<const std::size_t> rows,
                                                     std::span<const VariableId> vars, double rho, double alpha,
                                                     Execution exec = Execution::parallel);

// ---------------------------------------------------- exchangeability tests

/// Default cap on exact enumeration in the full test.
inline constexpr std::size_t kDefaultFullTestMaxVars = 8;

/// Expected probability of each of the 2^n assignments under the unsmoothed
/// maximum-likelihood counting-statistic model. Cell index bit k holds the
/// value of vars[k]. Throws CapacityError when n > max_vars.
std::vector<double> fit_exchangeable_null(const BinaryDataset& data, std::span<const std::size_t> rows,
                                          std::span<const VariableId> vars,
                                          std::size_t max_vars = kDefaultFullTestMaxVars);

struct Chi2Result {
  bool exchangeable = true;
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
};

/// Pearson goodness of fit to the exchangeable null over 2^n cells with
/// 2^n - 1 - n degrees of freedom; rejects when the p-value is below
/// `significance`.
Chi2Result chi2_exchangeability_full(const BinaryDataset& data, std::span<const std::size_t> rows,
                                     std::span<const VariableId> vars, double significance,
                                     std::size_t max_vars = kDefaultFullTestMaxVars);

/// The full test on one pair, computed from its counts.
Chi2Result chi2_exchangeability_pair(const PairCounts& counts, double significance);

struct PairDiagnostic {
  VariableId a = 0;
  VariableId b = 0;
  double g = 0.0;  // g statistic with the requested smoothing
  Chi2Result chi2;
};

/// How the per-pair level is derived from the requested significance.
enum class PairCorrection {
  none,        // each pair at p
  bonferroni,  // each pair at p / (number of pairs)
};

std::string_view to_string(PairCorrection c) noexcept;
PairCorrection parse_pair_correction(std::string_view text);

struct PairwiseExchangeability {
  bool exchangeable = true;
  double pair_level = 0.0;  // level each pair was tested at
  std::vector<PairDiagnostic> pairs;  // pair_index order
};

/// Full test on every pair; exchangeable iff no pair rejects.
PairwiseExchangeability chi2_exchangeability_pairwise(const BinaryDataset& data, std::span<const std::size_t> rows,
                                                      std::span<const VariableId> vars, double significance,
                                                      PairCorrection correction = PairCorrection::none,
                                                      double g_alpha = 0.0, Execution exec = Execution::parallel);

}  // namespace xspn
