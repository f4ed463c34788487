#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "xspn/dataset.hpp"
#include "xspn/stats.hpp"

namespace xspn {

/// Hard assignment of a row subset to clusters.
struct RowPartition {
  std::vector<std::uint32_t> assignment;  // per position in the clustered row list
  std::size_t clusters = 0;
  /// Some cluster received no rows.
  bool degenerate = false;

  std::vector<std::size_t> sizes() const;
  /// Rows of each cluster, taken from `rows` (the list that was clustered).
  std::vector<std::vector<std::size_t>> members(std::span<const std::size_t> rows) const;
};

struct GmmOptions {
  double variance_floor = 1e-3;
  /// Stop when the mean per-row log-likelihood changes by less than this.
  double tolerance = 1e-4;
  std::size_t max_iterations = 100;
};

/// EM for a k-component Gaussian mixture with diagonal covariances over the
/// rows (restricted to `vars`) treated as real vectors. Responsibilities start
/// from seeded uniform draws normalized per row; rows go to the component
/// with the largest final responsibility (ties to the lower index).
/// Deterministic given (data, rows, vars, k, seed), whatever the thread count.
RowPartition cluster_rows(const BinaryDataset& data, std::span<const std::size_t> rows,
                          std::span<const VariableId> vars, std::size_t k, std::uint64_t seed,
                          const GmmOptions& options = {}, Execution exec = Execution::parallel);

}  // namespace xspn
